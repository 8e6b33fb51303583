pub mod decay;
pub mod growth;
pub mod norms;
pub mod pi_good;
pub mod shift_avg;
pub mod verify;
