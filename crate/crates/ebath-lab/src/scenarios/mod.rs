//! One module per CLI scenario. Each `run` takes the validated config, the
//! seed and the output directory, writes its CSV tables and returns the
//! serialized JSON summary.

pub mod gausslaw;
pub mod irkernel;
pub mod kinetics;
pub mod twoslit;
pub mod units_check;
pub mod wavepacket;

use serde::Serialize;

/// Serialize a summary struct to the canonical JSON bytes used both on
/// stdout and in summary.json.
pub fn to_summary_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("summary serialization");
    s.push('\n');
    s
}
