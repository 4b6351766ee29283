//! Analytical performance model: optical power budget, bit-slot latency and
//! per-component energy for GEMM workloads.
//!
//! Default parameters are calibration targets, not measurements; see the
//! provenance table in `docs/calibration.md`.

mod baseline;
mod budget;
mod energy;
mod latency;
mod workload;

pub use baseline::{baseline_cost, BaselineCost, BaselineParams};
pub use budget::{max_lanes_per_wavelength, oag_requirement_dbm, required_laser_power, split_loss_db};
pub use energy::{gemm_energy, workload_energy, EnergyComponent, EnergyReport};
pub use latency::{gemm_latency, workload_latency, GemmLatency, LatencyReport};
pub use workload::{transformer_workload, GemmShape, GemmWorkload, WorkloadSpec, PRESETS};

use crate::error::{Error, Result};
use crate::kv::FlatConfig;
use crate::vdpe::VdpeConfig;

/// Per-event energies in picojoules.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyPerBit {
    /// Per serialized symbol (magnitude bits plus the sign slot).
    pub serializer: f64,
    /// Per comparator decision of a B-to-S converter.
    pub b_to_s: f64,
    /// Per active lane bit slot of an optical AND gate.
    pub oag: f64,
    /// Per integrated bit slot of a photo-charge accumulator.
    pub pca: f64,
    pub adc_per_conversion: f64,
    pub sram_per_byte: f64,
}

impl Default for EnergyPerBit {
    fn default() -> Self {
        EnergyPerBit {
            serializer: 0.5,
            b_to_s: 0.05,
            oag: 0.05,
            pca: 0.002,
            adc_per_conversion: 2.0,
            sram_per_byte: 0.1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhotonicParams {
    pub bitrate_gbps: f64,
    /// Optical power each OAG needs at its input.
    pub oag_optical_power_uw: f64,
    pub insertion_loss_db_per_oag: f64,
    /// Excess loss of one 1x2 splitter stage on top of the ideal 3.01 dB.
    pub splitter_excess_loss_db: f64,
    pub propagation_loss_db: f64,
    pub detector_sensitivity_dbm: f64,
    pub laser_wallplug_efficiency: f64,
    /// Per-wavelength laser output.
    pub laser_power_dbm: f64,
    pub energy_per_bit: EnergyPerBit,
}

impl Default for PhotonicParams {
    fn default() -> Self {
        PhotonicParams {
            bitrate_gbps: 30.0,
            oag_optical_power_uw: 0.5,
            insertion_loss_db_per_oag: 1.0,
            splitter_excess_loss_db: 0.05,
            propagation_loss_db: 2.0,
            detector_sensitivity_dbm: -40.0,
            laser_wallplug_efficiency: 0.2,
            laser_power_dbm: 1.0,
            energy_per_bit: EnergyPerBit::default(),
        }
    }
}

impl PhotonicParams {
    pub fn validate(&self) -> Result<()> {
        let losses = [
            ("insertion_loss_db_per_oag", self.insertion_loss_db_per_oag),
            ("splitter_excess_loss_db", self.splitter_excess_loss_db),
            ("propagation_loss_db", self.propagation_loss_db),
        ];
        for (name, v) in losses {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::InvalidConfig(format!("{name} must be >= 0, got {v}")));
            }
        }
        if !(self.bitrate_gbps.is_finite() && self.bitrate_gbps > 0.0) {
            return Err(Error::InvalidConfig("bitrate_gbps must be positive".into()));
        }
        if !(self.oag_optical_power_uw.is_finite() && self.oag_optical_power_uw > 0.0) {
            return Err(Error::InvalidConfig("oag_optical_power_uw must be positive".into()));
        }
        let eff = self.laser_wallplug_efficiency;
        if !(eff > 0.0 && eff <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "laser_wallplug_efficiency must be in (0, 1], got {eff}"
            )));
        }
        if !self.laser_power_dbm.is_finite() || !self.detector_sensitivity_dbm.is_finite() {
            return Err(Error::InvalidConfig("laser and detector powers must be finite".into()));
        }
        let e = &self.energy_per_bit;
        for v in [e.serializer, e.b_to_s, e.oag, e.pca, e.adc_per_conversion, e.sram_per_byte] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::InvalidConfig("per-event energies must be >= 0".into()));
            }
        }
        Ok(())
    }

    pub fn bitrate_hz(&self) -> f64 {
        self.bitrate_gbps * 1e9
    }

    /// Reads the flat keys named after the fields; `energy_per_bit.<name>`
    /// for the per-event energies. Missing keys keep their defaults.
    pub fn from_kv(kv: &FlatConfig) -> Result<Self> {
        let mut p = PhotonicParams::default();
        let fields: [(&str, &mut f64); 8] = [
            ("bitrate_gbps", &mut p.bitrate_gbps),
            ("oag_optical_power_uw", &mut p.oag_optical_power_uw),
            ("insertion_loss_db_per_oag", &mut p.insertion_loss_db_per_oag),
            ("splitter_excess_loss_db", &mut p.splitter_excess_loss_db),
            ("propagation_loss_db", &mut p.propagation_loss_db),
            ("detector_sensitivity_dbm", &mut p.detector_sensitivity_dbm),
            ("laser_wallplug_efficiency", &mut p.laser_wallplug_efficiency),
            ("laser_power_dbm", &mut p.laser_power_dbm),
        ];
        for (key, slot) in fields {
            if let Some(v) = kv.f64(key)? {
                *slot = v;
            }
        }
        let e = &mut p.energy_per_bit;
        let energies: [(&str, &mut f64); 6] = [
            ("energy_per_bit.serializer", &mut e.serializer),
            ("energy_per_bit.b_to_s", &mut e.b_to_s),
            ("energy_per_bit.oag", &mut e.oag),
            ("energy_per_bit.pca", &mut e.pca),
            ("energy_per_bit.adc_per_conversion", &mut e.adc_per_conversion),
            ("energy_per_bit.sram_per_byte", &mut e.sram_per_byte),
        ];
        for (key, slot) in energies {
            if let Some(v) = kv.f64(key)? {
                *slot = v;
            }
        }
        p.validate()?;
        Ok(p)
    }

    pub const KEYS: [&'static str; 14] = [
        "bitrate_gbps",
        "oag_optical_power_uw",
        "insertion_loss_db_per_oag",
        "splitter_excess_loss_db",
        "propagation_loss_db",
        "detector_sensitivity_dbm",
        "laser_wallplug_efficiency",
        "laser_power_dbm",
        "energy_per_bit.serializer",
        "energy_per_bit.b_to_s",
        "energy_per_bit.oag",
        "energy_per_bit.pca",
        "energy_per_bit.adc_per_conversion",
        "energy_per_bit.sram_per_byte",
    ];
}

/// Core and lane organization of the accelerator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArchConfig {
    pub vdpe_count: usize,
    pub wavelengths: usize,
    /// Functional engine parameters; `vdpe.lanes` is the lane count per VDPE.
    pub vdpe: VdpeConfig,
}

impl Default for ArchConfig {
    fn default() -> Self {
        ArchConfig {
            vdpe_count: 8,
            wavelengths: 1,
            vdpe: VdpeConfig::default(),
        }
    }
}

impl ArchConfig {
    pub fn lanes_per_vdpe(&self) -> usize {
        self.vdpe.lanes
    }

    /// Independent engines (one per VDPE and wavelength).
    pub fn engines(&self) -> usize {
        self.vdpe_count * self.wavelengths
    }

    pub fn validate(&self, params: &PhotonicParams) -> Result<()> {
        if self.vdpe_count == 0 || self.wavelengths == 0 {
            return Err(Error::InvalidConfig(
                "vdpe_count and wavelengths must be positive".into(),
            ));
        }
        self.vdpe.validate()?;
        let max = max_lanes_per_wavelength(params, params.laser_power_dbm);
        if self.lanes_per_vdpe() as u64 > max {
            return Err(Error::InvalidConfig(format!(
                "{} lanes per VDPE exceed the {max} lanes the optical budget supports at {} dBm",
                self.lanes_per_vdpe(),
                params.laser_power_dbm
            )));
        }
        Ok(())
    }
}
