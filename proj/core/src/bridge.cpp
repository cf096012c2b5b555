// Copyright 2026 The hetsim Authors
// SPDX-License-Identifier: Apache-2.0
