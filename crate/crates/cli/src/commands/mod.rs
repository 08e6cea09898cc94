pub mod bench;
pub mod diagnose;
pub mod followup;
pub mod generate;
