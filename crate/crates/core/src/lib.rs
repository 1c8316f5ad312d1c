pub mod barcode;
pub mod field;
pub mod fcomplex;
pub mod specinv;
pub mod sublevel;
pub mod demo;
pub mod random;
pub mod svg;
pub mod cli;
