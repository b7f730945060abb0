pub mod bias;
pub mod campaign;
pub mod decode;
pub mod exponent;
pub mod gen;
pub mod harvest;
pub mod verify;
