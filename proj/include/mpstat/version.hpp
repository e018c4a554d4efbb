// Copyright 2026 The mpstat Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

namespace mpstat {
inline constexpr const char* kVersion = "0.1.0";
}
