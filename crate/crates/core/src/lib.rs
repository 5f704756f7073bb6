pub mod arena;
pub mod fairtest;
pub mod lts;
pub mod strategy;
pub mod term;
