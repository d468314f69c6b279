pub mod diagnostics;
pub mod flux;
pub mod grid;
pub mod harness;
pub mod params;
pub mod scheme;
pub mod thermo;
pub mod timeloop;
pub mod vec3;
