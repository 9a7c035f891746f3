//! Oracles for the test suites. Nothing here shares code with the
//! implementations it checks.

pub mod alg1;
pub mod pam;
pub mod random_lp;
pub mod tableau;
pub mod toy;
