pub mod assimilate;
pub mod interp_study;
pub mod simulate;
pub mod verify;
