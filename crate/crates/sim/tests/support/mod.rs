//! Checks shared by the simulator tests and the acceptance runner. Each
//! returns a short summary or the first failure.
#![allow(dead_code)]

macro_rules! ensure {
    ($cond:expr, $($msg:tt)*) => {
        if !$cond {
            return Err(format!($($msg)*));
        }
    };
}

pub mod grid;
pub mod local;
pub mod volume;

use lcl_core::Label;
use lcl_sim::InputDist;

pub fn ab() -> InputDist {
    InputDist::Uniform(vec![Label::base("a"), Label::base("b")])
}
