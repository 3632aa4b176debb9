//! Onshore wind: vertical profile, speed distribution, power-curve yield,
//! turbine selection and per-cell potential.

mod potential;
mod profile;
mod turbine;

pub use potential::{
    select_turbine, select_turbine_at, wind_potential, write_sites_csv, RoughnessTable,
    TurbineChoice, WindPotential, WindSite,
};
pub use profile::{extrapolate_wind, speed_distribution, WeibullDistribution, REFERENCE_HEIGHT};
pub use turbine::{
    annual_energy, annual_energy_with_step, cubic_power_curve, default_turbine_db,
    parse_turbine_db, read_turbine_db, write_turbine_db, TurbineSpacing, TurbineSpec, DEFAULT_STEP,
    HOURS_PER_YEAR,
};
