pub mod curve;
pub mod interval;
pub mod plan;
pub mod serve;
pub mod simulate;
