use std::fmt;

use super::{gemm_latency, ArchConfig, GemmShape, GemmWorkload, PhotonicParams};

const PJ: f64 = 1e-12;

/// Energy consumers. There is no DAC: operands enter the optical domain as
/// binary ON/OFF streams.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EnergyComponent {
    Serializer,
    BToS,
    Oag,
    Pca,
    Adc,
    Laser,
    Memory,
}

impl EnergyComponent {
    pub const ALL: [EnergyComponent; 7] = [
        EnergyComponent::Serializer,
        EnergyComponent::BToS,
        EnergyComponent::Oag,
        EnergyComponent::Pca,
        EnergyComponent::Adc,
        EnergyComponent::Laser,
        EnergyComponent::Memory,
    ];

    pub fn name(self) -> &'static str {
        match self {
            EnergyComponent::Serializer => "serializer",
            EnergyComponent::BToS => "b_to_s",
            EnergyComponent::Oag => "oag",
            EnergyComponent::Pca => "pca",
            EnergyComponent::Adc => "adc",
            EnergyComponent::Laser => "laser",
            EnergyComponent::Memory => "memory",
        }
    }

    fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for EnergyComponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct EnergyReport {
    joules: [f64; 7],
    /// ADC conversions counted for this report.
    pub adc_conversions: u64,
}

impl EnergyReport {
    pub fn joules(&self, c: EnergyComponent) -> f64 {
        self.joules[c.index()]
    }

    pub fn components(&self) -> impl Iterator<Item = (EnergyComponent, f64)> + '_ {
        EnergyComponent::ALL.into_iter().map(|c| (c, self.joules(c)))
    }

    /// Sum of the components in declaration order.
    pub fn total(&self) -> f64 {
        self.joules.iter().sum()
    }

    pub fn percent(&self, c: EnergyComponent) -> f64 {
        let total = self.total();
        if total == 0.0 {
            0.0
        } else {
            100.0 * self.joules(c) / total
        }
    }

    /// Components sorted by descending energy (ties keep declaration order).
    pub fn ranked(&self) -> Vec<(EnergyComponent, f64)> {
        let mut v: Vec<_> = self.components().collect();
        v.sort_by(|a, b| b.1.total_cmp(&a.1));
        v
    }

    fn add(&mut self, other: &EnergyReport) {
        for (a, b) in self.joules.iter_mut().zip(other.joules) {
            *a += b;
        }
        self.adc_conversions += other.adc_conversions;
    }
}

/// Event counts for one GEMM:
///
/// - every operand element is converted and serialized once
///   (`M*K + K*N` streams);
/// - every active lane sees one OAG and one PCA event per bit slot
///   (`M*N*K*stream_length`);
/// - one ADC conversion per output (`M*N`);
/// - one byte per operand element read and per output written;
/// - the lasers of all engines burn wall-plug power for the GEMM latency.
pub fn gemm_energy(g: &GemmShape, arch: &ArchConfig, p: &PhotonicParams) -> EnergyReport {
    let e = &p.energy_per_bit;
    let n = arch.vdpe.sc.stream_length as f64;
    let operands = (g.m * g.k + g.k * g.n) as f64;
    let lane_slots = g.macs() as f64 * n;
    let outputs = g.outputs();
    let latency = gemm_latency(g, arch, p).seconds;
    let laser_watts = 10f64.powf(p.laser_power_dbm / 10.0) * 1e-3 * arch.engines() as f64;

    let mut r = EnergyReport {
        adc_conversions: outputs,
        ..EnergyReport::default()
    };
    let mut set = |c: EnergyComponent, j: f64| r.joules[c.index()] = j;
    set(EnergyComponent::Serializer, operands * (n + 1.0) * e.serializer * PJ);
    set(EnergyComponent::BToS, operands * n * e.b_to_s * PJ);
    set(EnergyComponent::Oag, lane_slots * e.oag * PJ);
    set(EnergyComponent::Pca, lane_slots * e.pca * PJ);
    set(EnergyComponent::Adc, outputs as f64 * e.adc_per_conversion * PJ);
    set(EnergyComponent::Laser, laser_watts / p.laser_wallplug_efficiency * latency);
    set(
        EnergyComponent::Memory,
        (operands + outputs as f64) * e.sram_per_byte * PJ,
    );
    r
}

pub fn workload_energy(w: &GemmWorkload, arch: &ArchConfig, p: &PhotonicParams) -> EnergyReport {
    let mut total = EnergyReport::default();
    for g in &w.gemms {
        total.add(&gemm_energy(g, arch, p));
    }
    total
}
