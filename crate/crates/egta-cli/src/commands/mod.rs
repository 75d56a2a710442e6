pub mod eval;
pub mod generate;
pub mod mrcp;
pub mod psro;
pub mod reproduce;
