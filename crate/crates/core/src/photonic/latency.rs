use super::{ArchConfig, GemmShape, GemmWorkload, PhotonicParams};

#[derive(Debug, Clone, PartialEq)]
pub struct GemmLatency {
    pub name: String,
    /// Passes per output element, `ceil(K / lanes)`.
    pub passes: u64,
    /// Serialized bit slots including the pipeline fill.
    pub bit_slots: u64,
    pub seconds: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct LatencyReport {
    pub per_gemm: Vec<GemmLatency>,
    pub total_bit_slots: u64,
    pub total_seconds: f64,
}

/// Bit slots per pass: the magnitude stream plus one sign slot.
fn slots_per_pass(arch: &ArchConfig) -> u64 {
    arch.vdpe.sc.stream_length as u64 + 1
}

/// `(ceil(MN / engines) * ceil(K / lanes) + 1) * (N + 1) / bitrate`; the
/// extra pass is the serializer pipeline fill.
pub fn gemm_latency(g: &GemmShape, arch: &ArchConfig, p: &PhotonicParams) -> GemmLatency {
    let passes = g.k.div_ceil(arch.lanes_per_vdpe()) as u64;
    let rounds = g.outputs().div_ceil(arch.engines() as u64);
    let bit_slots = (rounds * passes + 1) * slots_per_pass(arch);
    GemmLatency {
        name: g.name.clone(),
        passes,
        bit_slots,
        seconds: bit_slots as f64 / p.bitrate_hz(),
    }
}

/// Serial schedule: GEMMs run back to back.
pub fn workload_latency(w: &GemmWorkload, arch: &ArchConfig, p: &PhotonicParams) -> LatencyReport {
    let per_gemm: Vec<GemmLatency> = w.gemms.iter().map(|g| gemm_latency(g, arch, p)).collect();
    LatencyReport {
        total_bit_slots: per_gemm.iter().map(|g| g.bit_slots).sum(),
        total_seconds: per_gemm.iter().map(|g| g.seconds).sum(),
        per_gemm,
    }
}
