// Copyright 2026 The aplab Authors
// SPDX-License-Identifier: Apache-2.0

//! Holds the `acceptance` test target; there is no library surface.
