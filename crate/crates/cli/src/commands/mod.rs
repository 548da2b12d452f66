pub mod check;
pub mod denoise;
pub mod rates;
pub mod simulate;
