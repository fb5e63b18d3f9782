#![allow(dead_code)]

pub mod anova;
pub mod kn;
