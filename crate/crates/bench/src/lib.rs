// Copyright 2026 The oqs-lab Authors
// SPDX-License-Identifier: Apache-2.0

//! Shared fixtures for the benchmark targets.

pub use oqs_core::testing;
