pub mod coherent;
pub mod error;
pub mod fockrep;
pub mod grassmann;
pub mod harness;
pub mod operator;
pub mod phase;
pub mod qcore;
pub mod report;
pub mod symmetry;
