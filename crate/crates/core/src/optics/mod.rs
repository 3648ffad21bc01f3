//! Addressing optics: light modulator, microlens array, illumination and
//! the relay telescope that images the focal-spot array into the cell.

mod beam;
mod imaging;
mod mla;
pub mod quadrature;
mod slm;

pub use beam::{aperture_fraction, aperture_fraction_quadrature, disk_transmission, lens_input_power, IlluminationBeam};
pub use imaging::{diffraction_limits, DEFAULT_WAIST, project_focal_array, DiffractionLimits, ImagingTrainSpec, LensPower, TrapSite, TrapSiteArray};
pub use mla::{build_address_map, LensAddressMap, MicrolensArraySpec, PixelDisk, DEFAULT_DISK_AREA_PX};
pub use slm::{level_to_transmission, rasterize_pattern, SlmMask, SlmSpec};
pub(crate) use mla::build_address_map_with_area;
