// Copyright cpufsim contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#pragma once

namespace cpuf {

constexpr const char* kVersion = "1.0.0";

} // namespace cpuf
