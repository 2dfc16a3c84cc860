//! One-second block extraction, 1..=300 Hz magnitude spectra and
//! peak-normalized heat maps.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;
use std::sync::Arc;

use rand::Rng;
use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::rng::rng_from;
use crate::synthgen::Recording;
use crate::MAX_FREQ_HZ;

/// Heat-map values run from 0 to this.
pub const HEATMAP_SCALE: f64 = 10.0;

/// Exactly one second of one channel.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeBlock {
    pub channel_id: String,
    pub label: String,
    /// Sample index of the block start within the recording.
    pub offset: usize,
    pub samples: Vec<f64>,
}

/// Magnitudes at 1..=300 Hz; `bins[i]` is the magnitude at `i + 1` Hz.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub channel_id: String,
    pub label: String,
    pub bins: Vec<f64>,
}

/// Random one-second start offsets, uniform over `[0, len - rate]`.
pub fn block_offsets(len: usize, sample_rate_hz: u32, count: usize, seed: u64) -> Result<Vec<usize>> {
    let block = sample_rate_hz as usize;
    if block == 0 || len < block {
        return Err(Error::Validation(format!(
            "recording of {len} samples is shorter than one second at {sample_rate_hz} Hz"
        )));
    }
    if count == 0 {
        return Err(Error::Validation("block count must be at least 1".into()));
    }
    let mut rng = rng_from(seed);
    let last = len - block;
    Ok((0..count).map(|_| rng.random_range(0..=last)).collect())
}

/// Extracts `count` blocks per channel, returned as `[channel][block]` in the
/// recording's channel order. All channels share the same offsets.
pub fn extract_blocks(rec: &Recording, count: usize, seed: u64) -> Result<Vec<Vec<TimeBlock>>> {
    let ids: Vec<&str> = rec.channel_ids.iter().map(String::as_str).collect();
    extract_channel_blocks(rec, &ids, count, seed)
}

/// Like [`extract_blocks`] for a subset of channels. Offsets depend only on
/// the seed, never on which channels are requested.
pub fn extract_channel_blocks(
    rec: &Recording,
    channels: &[&str],
    count: usize,
    seed: u64,
) -> Result<Vec<Vec<TimeBlock>>> {
    let offsets = block_offsets(rec.len(), rec.sample_rate_hz, count, seed)?;
    let width = rec.sample_rate_hz as usize;
    channels
        .iter()
        .map(|&id| {
            let data = rec
                .channel(id)
                .ok_or_else(|| Error::Config(format!("recording has no channel {id:?}")))?;
            Ok(offsets
                .iter()
                .map(|&off| TimeBlock {
                    channel_id: id.to_string(),
                    label: rec.label.clone(),
                    offset: off,
                    samples: data[off..off + width].to_vec(),
                })
                .collect())
        })
        .collect()
}

/// Caches FFT plans across blocks of the same length.
pub struct SpectrumAnalyzer {
    planner: FftPlanner<f64>,
    plans: HashMap<usize, Arc<dyn Fft<f64>>>,
    buffer: Vec<Complex<f64>>,
    scratch: Vec<Complex<f64>>,
}

impl Default for SpectrumAnalyzer {
    fn default() -> Self {
        Self::new()
    }
}

impl SpectrumAnalyzer {
    pub fn new() -> Self {
        Self {
            planner: FftPlanner::new(),
            plans: HashMap::new(),
            buffer: Vec::new(),
            scratch: Vec::new(),
        }
    }

    /// Full-length complex DFT of a real signal.
    pub fn dft(&mut self, samples: &[f64]) -> Vec<Complex<f64>> {
        self.transform(samples);
        self.buffer.clone()
    }

    fn transform(&mut self, samples: &[f64]) {
        let n = samples.len();
        let planner = &mut self.planner;
        let fft = self
            .plans
            .entry(n)
            .or_insert_with(|| planner.plan_fft_forward(n))
            .clone();
        self.buffer.clear();
        self.buffer
            .extend(samples.iter().map(|&x| Complex::new(x, 0.0)));
        self.scratch
            .resize(fft.get_inplace_scratch_len(), Complex::new(0.0, 0.0));
        fft.process_with_scratch(&mut self.buffer, &mut self.scratch);
    }

    pub fn magnitude_spectrum(&mut self, block: &TimeBlock) -> Result<Spectrum> {
        let n = block.samples.len();
        if n < 2 * MAX_FREQ_HZ {
            return Err(Error::Validation(format!(
                "block of {n} samples too short; need at least {} for a {MAX_FREQ_HZ} Hz bin",
                2 * MAX_FREQ_HZ
            )));
        }
        if block.samples.iter().any(|x| !x.is_finite()) {
            return Err(Error::Validation(format!(
                "block of channel {:?} has non-finite samples",
                block.channel_id
            )));
        }
        self.transform(&block.samples);
        Ok(Spectrum {
            channel_id: block.channel_id.clone(),
            label: block.label.clone(),
            bins: self.buffer[1..=MAX_FREQ_HZ].iter().map(|c| c.norm()).collect(),
        })
    }
}

pub fn magnitude_spectrum(block: &TimeBlock) -> Result<Spectrum> {
    SpectrumAnalyzer::new().magnitude_spectrum(block)
}

#[derive(Debug, Clone, PartialEq)]
pub struct HeatMapRow {
    pub channel_id: String,
    pub trial: usize,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HeatMap {
    pub label: String,
    pub rows: Vec<HeatMapRow>,
}

/// Scales each `(trial, spectrum)` row so its peak is 10, grouping rows by
/// channel in order of first appearance. All-zero rows stay zero.
pub fn build_heatmap(spectra: &[(usize, Spectrum)]) -> Result<HeatMap> {
    let Some((_, first)) = spectra.first() else {
        return Err(Error::Validation("heat map needs at least one spectrum".into()));
    };
    let label = first.label.clone();
    if let Some((_, s)) = spectra.iter().find(|(_, s)| s.label != label) {
        return Err(Error::Validation(format!(
            "heat map mixes labels {label:?} and {:?}",
            s.label
        )));
    }
    let mut order: Vec<&str> = Vec::new();
    for (_, s) in spectra {
        if !order.contains(&s.channel_id.as_str()) {
            order.push(&s.channel_id);
        }
    }
    let mut rows = Vec::with_capacity(spectra.len());
    for ch in order {
        for (trial, s) in spectra.iter().filter(|(_, s)| s.channel_id == ch) {
            let peak = s.bins.iter().copied().fold(0.0, f64::max);
            let values = if peak > 0.0 {
                s.bins.iter().map(|&v| v * HEATMAP_SCALE / peak).collect()
            } else {
                vec![0.0; s.bins.len()]
            };
            rows.push(HeatMapRow {
                channel_id: ch.to_string(),
                trial: *trial,
                values,
            });
        }
    }
    Ok(HeatMap { label, rows })
}

/// ASCII PGM (P2), one image row per heat-map row; 10 maps to 255.
pub fn heatmap_to_pgm(map: &HeatMap) -> String {
    let width = map.rows.first().map_or(0, |r| r.values.len());
    let mut out = format!("P2\n# heat map {}\n{} {}\n255\n", map.label, width, map.rows.len());
    for row in &map.rows {
        let line: Vec<String> = row
            .values
            .iter()
            .map(|&v| ((v / HEATMAP_SCALE * 255.0).round().clamp(0.0, 255.0) as u8).to_string())
            .collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}

pub fn heatmap_to_csv(map: &HeatMap) -> String {
    let width = map.rows.first().map_or(0, |r| r.values.len());
    let mut out = String::from("channel,trial");
    for f in 1..=width {
        let _ = write!(out, ",{f}");
    }
    out.push('\n');
    for row in &map.rows {
        let _ = write!(out, "{},{}", row.channel_id, row.trial);
        for v in &row.values {
            let _ = write!(out, ",{v}");
        }
        out.push('\n');
    }
    out
}

pub fn spectra_to_csv(spectra: &[Spectrum]) -> String {
    let mut out = String::from("channel,label");
    for f in 1..=MAX_FREQ_HZ {
        let _ = write!(out, ",{f}");
    }
    out.push('\n');
    for s in spectra {
        let _ = write!(out, "{},{}", s.channel_id, s.label);
        for v in &s.bins {
            let _ = write!(out, ",{v}");
        }
        out.push('\n');
    }
    out
}

pub fn write_heatmap(pgm_path: &Path, csv_path: &Path, map: &HeatMap) -> Result<()> {
    std::fs::write(pgm_path, heatmap_to_pgm(map)).map_err(|e| Error::io(pgm_path, e))?;
    std::fs::write(csv_path, heatmap_to_csv(map)).map_err(|e| Error::io(csv_path, e))
}
