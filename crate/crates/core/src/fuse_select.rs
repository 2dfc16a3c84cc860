//! Weighted-average fusion of channel spectra and ratio-based selection of
//! the frequency bins that discriminate between classes.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::Spectrum;
use crate::MAX_FREQ_HZ;

pub const DEFAULT_THRESHOLD: f64 = 1.75;

/// Per-channel weights and the ordered channel list they apply to.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FusionWeights {
    pub weights: BTreeMap<String, f64>,
    pub selected_channels: Vec<String>,
}

impl FusionWeights {
    pub fn uniform<S: AsRef<str>>(channels: &[S]) -> Self {
        Self {
            weights: channels.iter().map(|c| (c.as_ref().to_string(), 1.0)).collect(),
            selected_channels: channels.iter().map(|c| c.as_ref().to_string()).collect(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.selected_channels.is_empty() {
            return Err(Error::Config("fusion needs at least one channel".into()));
        }
        let mut total = 0.0;
        for ch in &self.selected_channels {
            let w = *self
                .weights
                .get(ch)
                .ok_or_else(|| Error::Config(format!("no fusion weight for channel {ch:?}")))?;
            if !w.is_finite() || w < 0.0 {
                return Err(Error::Validation(format!(
                    "fusion weight {w} for {ch:?} must be finite and nonnegative"
                )));
            }
            total += w;
        }
        if total <= 0.0 {
            return Err(Error::Validation("fusion weights sum to zero".into()));
        }
        Ok(())
    }
}

/// One fused 300-bin row and its class label.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumRow {
    pub bins: Vec<f64>,
    pub label: String,
}

/// `bins[i] = Σ w_j |S_ij| / Σ w_j` over the selected channels.
pub fn fuse(spectra: &[Spectrum], w: &FusionWeights) -> Result<SpectrumRow> {
    w.validate()?;
    let mut bins = vec![0.0; MAX_FREQ_HZ];
    let mut total = 0.0;
    let mut label: Option<&str> = None;
    for ch in &w.selected_channels {
        let s = spectra
            .iter()
            .find(|s| &s.channel_id == ch)
            .ok_or_else(|| Error::Config(format!("spectrum for channel {ch:?} missing")))?;
        match label {
            None => label = Some(&s.label),
            Some(l) if l != s.label => {
                return Err(Error::Validation(format!(
                    "fusing spectra of different labels {l:?} and {:?}",
                    s.label
                )))
            }
            _ => {}
        }
        if s.bins.len() != MAX_FREQ_HZ {
            return Err(Error::Validation(format!(
                "spectrum for {ch:?} has {} bins, expected {MAX_FREQ_HZ}",
                s.bins.len()
            )));
        }
        let wj = w.weights[ch];
        total += wj;
        for (b, v) in bins.iter_mut().zip(&s.bins) {
            *b += wj * v.abs();
        }
    }
    for b in &mut bins {
        *b /= total;
    }
    Ok(SpectrumRow {
        bins,
        label: label.expect("at least one channel").to_string(),
    })
}

/// Sorted distinct 1-based bin indices kept as network inputs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureMask {
    kept: Vec<usize>,
}

impl FeatureMask {
    pub fn new(mut kept: Vec<usize>) -> Result<Self> {
        kept.sort_unstable();
        kept.dedup();
        if kept.is_empty() {
            return Err(Error::Validation("feature mask is empty".into()));
        }
        if kept[0] == 0 || *kept.last().unwrap() > MAX_FREQ_HZ {
            return Err(Error::Validation(format!(
                "feature mask bins must lie in 1..={MAX_FREQ_HZ}"
            )));
        }
        Ok(Self { kept })
    }

    pub fn kept(&self) -> &[usize] {
        &self.kept
    }

    pub fn len(&self) -> usize {
        self.kept.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kept.is_empty()
    }
}

/// The masked feature vector, in ascending bin order.
pub fn apply_mask(row: &SpectrumRow, mask: &FeatureMask) -> Vec<f64> {
    mask.kept.iter().map(|&b| row.bins[b - 1]).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelectionReport {
    /// Class labels in first-appearance order; indexes the per-class tables.
    pub labels: Vec<String>,
    pub class_means: Vec<Vec<f64>>,
    pub global_mean: Vec<f64>,
    /// `None` where the global mean is zero.
    pub ratios: Vec<Vec<Option<f64>>>,
    pub threshold: f64,
    pub max_classes_per_bin: usize,
    /// Number of classes whose ratio exceeds the threshold, per bin.
    pub per_bin_class_counts: Vec<usize>,
    /// 1-based bins that passed both the threshold and the guard.
    pub kept: Vec<usize>,
    pub warnings: Vec<String>,
}

impl SelectionReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("series");
        for f in 1..=MAX_FREQ_HZ {
            let _ = write!(out, ",{f}");
        }
        out.push('\n');
        let mut row = |name: &str, vals: &mut dyn Iterator<Item = String>| {
            out.push_str(name);
            for v in vals {
                out.push(',');
                out.push_str(&v);
            }
            out.push('\n');
        };
        for (label, means) in self.labels.iter().zip(&self.class_means) {
            row(&format!("mean:{label}"), &mut means.iter().map(f64::to_string));
        }
        row("global_mean", &mut self.global_mean.iter().map(f64::to_string));
        for (label, ratios) in self.labels.iter().zip(&self.ratios) {
            row(
                &format!("ratio:{label}"),
                &mut ratios.iter().map(|r| r.map_or_else(String::new, |v| v.to_string())),
            );
        }
        row(
            "super_count",
            &mut self.per_bin_class_counts.iter().map(usize::to_string),
        );
        row(
            "kept",
            &mut (1..=MAX_FREQ_HZ).map(|b| u8::from(self.kept.binary_search(&b).is_ok()).to_string()),
        );
        out
    }
}

/// Guard default: a bin may be super-threshold for at most ⌈T/2⌉ − 1 of
/// `T` classes, but never fewer than one.
pub fn default_max_classes_per_bin(class_count: usize) -> usize {
    (class_count.div_ceil(2)).saturating_sub(1).max(1)
}

/// Runs the selection and returns every intermediate, even when no bin
/// survives.
pub fn analyze_selection(
    rows: &[SpectrumRow],
    threshold: f64,
    max_classes_per_bin: usize,
) -> Result<SelectionReport> {
    if !(threshold.is_finite() && threshold > 1.0) {
        return Err(Error::Validation(format!(
            "selection threshold {threshold} must be greater than 1"
        )));
    }
    let mut labels: Vec<String> = Vec::new();
    let mut sums: Vec<Vec<f64>> = Vec::new();
    let mut counts: Vec<usize> = Vec::new();
    let mut grand = vec![0.0; MAX_FREQ_HZ];
    for row in rows {
        if row.bins.len() != MAX_FREQ_HZ {
            return Err(Error::Validation(format!(
                "row of {:?} has {} bins, expected {MAX_FREQ_HZ}",
                row.label,
                row.bins.len()
            )));
        }
        let k = match labels.iter().position(|l| *l == row.label) {
            Some(k) => k,
            None => {
                labels.push(row.label.clone());
                sums.push(vec![0.0; MAX_FREQ_HZ]);
                counts.push(0);
                labels.len() - 1
            }
        };
        counts[k] += 1;
        for ((s, g), &v) in sums[k].iter_mut().zip(&mut grand).zip(&row.bins) {
            *s += v;
            *g += v;
        }
    }
    if labels.len() < 2 {
        return Err(Error::Validation(format!(
            "selection needs at least 2 classes, found {}",
            labels.len()
        )));
    }
    if let Some(k) = counts.iter().position(|&c| c < 10) {
        return Err(Error::Validation(format!(
            "class {:?} has {} rows; selection needs at least 10",
            labels[k], counts[k]
        )));
    }

    let class_means: Vec<Vec<f64>> = sums
        .iter()
        .zip(&counts)
        .map(|(s, &n)| s.iter().map(|v| v / n as f64).collect())
        .collect();
    let global_mean: Vec<f64> = grand.iter().map(|g| g / rows.len() as f64).collect();

    let mut warnings = Vec::new();
    for (i, &g) in global_mean.iter().enumerate() {
        if g <= 0.0 {
            warnings.push(format!("bin {} has zero global mean; excluded", i + 1));
        }
    }
    let ratios: Vec<Vec<Option<f64>>> = class_means
        .iter()
        .map(|m| {
            m.iter()
                .zip(&global_mean)
                .map(|(&c, &g)| (g > 0.0).then(|| c / g))
                .collect()
        })
        .collect();
    let per_bin_class_counts: Vec<usize> = (0..MAX_FREQ_HZ)
        .map(|i| {
            ratios
                .iter()
                .filter(|r| r[i].is_some_and(|v| v > threshold))
                .count()
        })
        .collect();
    let kept = per_bin_class_counts
        .iter()
        .enumerate()
        .filter(|&(_, &n)| n >= 1 && n <= max_classes_per_bin)
        .map(|(i, _)| i + 1)
        .collect();

    for w in &warnings {
        log::warn!("{w}");
    }
    Ok(SelectionReport {
        labels,
        class_means,
        global_mean,
        ratios,
        threshold,
        max_classes_per_bin,
        per_bin_class_counts,
        kept,
        warnings,
    })
}

/// Bins where some class mean exceeds `threshold` times the grand mean,
/// dropping bins where more than `max_classes_per_bin` classes do.
pub fn compute_selection(
    rows: &[SpectrumRow],
    threshold: f64,
    max_classes_per_bin: usize,
) -> Result<(FeatureMask, SelectionReport)> {
    let report = analyze_selection(rows, threshold, max_classes_per_bin)?;
    if report.kept.is_empty() {
        return Err(Error::Selection(format!(
            "no bin exceeds threshold {threshold} for 1..={max_classes_per_bin} classes"
        )));
    }
    let mask = FeatureMask::new(report.kept.clone())?;
    Ok((mask, report))
}
