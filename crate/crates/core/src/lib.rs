//! Transport of loop classes along isotopies of finite planar point sets.

pub mod braid;
pub mod configspace;
pub mod loops;
pub mod oracle;
pub mod rational;
pub mod transport;
