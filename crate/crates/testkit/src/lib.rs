//! Test-only helpers shared by the workspace's test suites.
//!
//! Nothing here is part of the shipped toolchain. The mock server keeps
//! network tests on localhost, the archive builder fabricates repository
//! tarballs, the corpus module seeds stores with synthetic call sites,
//! and the oracle module re-implements the pattern definitions by
//! exhaustive enumeration so the real algorithms have something
//! independent to disagree with.

pub mod archive;
pub mod corpus;
pub mod http;
pub mod oracle;
