//! Axon compiler library.
//!
//! The pipeline runs text → AST → TAC → (certificate-checked optimization
//! passes) → bounds-check elimination → AArch64-subset assembly. Every
//! optimization pass emits a certificate; an independent checker validates it
//! before the transformed program is adopted. Interpreters exist at the AST,
//! TAC, and machine levels so behaviors can be compared end to end.

pub mod asmmach;
pub mod ast;
pub mod certcheck;
pub mod codegen;
pub mod driver;
pub mod frontend;
pub mod optim;
pub mod tac;
