//! Synthetic multi-sensor recordings with known sub-300 Hz signatures.
//!
//! Each target is a set of spectral lines per sensor channel plus white
//! Gaussian noise. Lines wobble in frequency once per second of recording
//! and start at a random phase, which models run-to-run engine variation.

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::TAU;
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;
use std::str::FromStr;

use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{derive_seed, rng_from, tag};
use crate::MAX_FREQ_HZ;

/// Lowest sample rate for which bin 300 sits below Nyquist.
pub const MIN_SAMPLE_RATE_HZ: u32 = 600;
pub const DEFAULT_SAMPLE_RATE_HZ: u32 = 2000;
pub const DEFAULT_JITTER_HZ: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SensorKind {
    Microphone,
    Geophone,
    Accelerometer,
    Magnetometer,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SensorChannel {
    pub id: String,
    pub kind: SensorKind,
    pub placement: String,
}

impl SensorChannel {
    pub fn new(id: &str, kind: SensorKind, placement: &str) -> Self {
        Self {
            id: id.to_string(),
            kind,
            placement: placement.to_string(),
        }
    }
}

/// The thirteen-channel roster of the field measurement setup.
pub fn standard_roster() -> Vec<SensorChannel> {
    use SensorKind::*;
    vec![
        SensorChannel::new("mic-front-10m", Microphone, "10m front"),
        SensorChannel::new("mic-front-5m", Microphone, "5m front"),
        SensorChannel::new("mic-on-target", Microphone, "on target"),
        SensorChannel::new("mic-side-10m", Microphone, "10m side"),
        SensorChannel::new("geophone-front-10m", Geophone, "10m front"),
        SensorChannel::new("geophone-front-5m", Geophone, "5m front"),
        SensorChannel::new("accel-front-10m", Accelerometer, "10m front"),
        SensorChannel::new("accel-front-5m", Accelerometer, "5m front"),
        SensorChannel::new("accel-engine", Accelerometer, "on target engine"),
        SensorChannel::new("accel-roof", Accelerometer, "on target roof"),
        SensorChannel::new("magnetometer-x", Magnetometer, "10m side, x axis"),
        SensorChannel::new("magnetometer-y", Magnetometer, "10m side, y axis"),
        SensorChannel::new("magnetometer-z", Magnetometer, "10m side, z axis"),
    ]
}

/// Checks ids are unique and returns them in roster order.
pub fn roster_ids(setup: &[SensorChannel]) -> Result<Vec<&str>> {
    let mut seen = BTreeSet::new();
    for ch in setup {
        if !seen.insert(ch.id.as_str()) {
            return Err(Error::Config(format!("duplicate channel id {:?}", ch.id)));
        }
    }
    Ok(setup.iter().map(|c| c.id.as_str()).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Group {
    Group1,
    Group2,
}

impl Group {
    pub fn labels(self) -> &'static [&'static str] {
        match self {
            Group::Group1 => &[
                "AllQuiet",
                "HondaCivic",
                "ToyotaCorolla",
                "FordF150",
                "MercedesSprinter",
                "FordFusion",
                "AcuraMDX",
            ],
            Group::Group2 => &["AllQuiet", "HondaGenerator", "FordF150", "Saab83"],
        }
    }

    /// Channels judged useful for this group by heat-map inspection.
    pub fn selected_channels(self) -> &'static [&'static str] {
        match self {
            Group::Group1 => &[
                "mic-front-10m",
                "mic-side-10m",
                "geophone-front-10m",
                "accel-front-10m",
            ],
            Group::Group2 => &["geophone-front-10m", "accel-front-5m", "magnetometer-z"],
        }
    }
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Group::Group1 => f.write_str("Group1"),
            Group::Group2 => f.write_str("Group2"),
        }
    }
}

impl FromStr for Group {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "group1" | "1" => Ok(Group::Group1),
            "group2" | "2" => Ok(Group::Group2),
            _ => Err(Error::Config(format!("unknown group {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralLine {
    pub freq_hz: u32,
    pub amplitude: f64,
    /// Std-dev of the per-second frequency wobble.
    #[serde(default)]
    pub jitter_hz: f64,
}

impl SpectralLine {
    pub fn new(freq_hz: u32, amplitude: f64, jitter_hz: f64) -> Self {
        Self {
            freq_hz,
            amplitude,
            jitter_hz,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(1..=MAX_FREQ_HZ as u32).contains(&self.freq_hz) {
            return Err(Error::Validation(format!(
                "line frequency {} Hz outside 1..={MAX_FREQ_HZ}",
                self.freq_hz
            )));
        }
        if !self.amplitude.is_finite() || self.amplitude < 0.0 {
            return Err(Error::Validation(format!(
                "line amplitude {} must be finite and nonnegative",
                self.amplitude
            )));
        }
        if !self.jitter_hz.is_finite() || self.jitter_hz < 0.0 {
            return Err(Error::Validation(format!(
                "line jitter {} must be finite and nonnegative",
                self.jitter_hz
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetProfile {
    pub label: String,
    pub noise_rms: f64,
    #[serde(default)]
    pub lines: BTreeMap<String, Vec<SpectralLine>>,
}

impl TargetProfile {
    pub fn new(label: &str, noise_rms: f64) -> Self {
        Self {
            label: label.to_string(),
            noise_rms,
            lines: BTreeMap::new(),
        }
    }

    pub fn with_line(mut self, channel: &str, line: SpectralLine) -> Self {
        self.lines.entry(channel.to_string()).or_default().push(line);
        self
    }

    pub fn line_count(&self) -> usize {
        self.lines.values().map(Vec::len).sum()
    }

    pub fn frequencies(&self) -> BTreeSet<u32> {
        self.lines
            .values()
            .flatten()
            .map(|l| l.freq_hz)
            .collect()
    }
}

/// Labels end up in CSV fields and file names, so they must be plain tokens.
pub fn validate_label(label: &str) -> Result<()> {
    let ok = !label.is_empty()
        && label
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.'));
    if ok {
        Ok(())
    } else {
        Err(Error::Validation(format!(
            "label {label:?} must be a nonempty token of [A-Za-z0-9_.-]"
        )))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Recording {
    pub label: String,
    pub sample_rate_hz: u32,
    pub channel_ids: Vec<String>,
    /// One array per channel, in `channel_ids` order.
    pub samples: Vec<Vec<f64>>,
    pub duration_s: f64,
}

impl Recording {
    pub fn len(&self) -> usize {
        self.samples.first().map_or(0, Vec::len)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn channel(&self, id: &str) -> Option<&[f64]> {
        self.channel_ids
            .iter()
            .position(|c| c == id)
            .map(|i| self.samples[i].as_slice())
    }
}

fn sample_count(duration_s: f64, sample_rate_hz: u32) -> Result<usize> {
    if sample_rate_hz < MIN_SAMPLE_RATE_HZ {
        return Err(Error::Validation(format!(
            "sample rate {sample_rate_hz} Hz below minimum {MIN_SAMPLE_RATE_HZ} Hz"
        )));
    }
    if !duration_s.is_finite() || duration_s < 1.0 {
        return Err(Error::Validation(format!(
            "duration {duration_s} s must be at least 1 s"
        )));
    }
    let n = duration_s * f64::from(sample_rate_hz);
    if n.fract() != 0.0 {
        return Err(Error::Validation(format!(
            "duration {duration_s} s does not give a whole number of samples at {sample_rate_hz} Hz"
        )));
    }
    Ok(n as usize)
}

/// Renders `profile` on every channel of `setup`. Channels without lines get
/// noise only.
pub fn synthesize_recording(
    profile: &TargetProfile,
    setup: &[SensorChannel],
    duration_s: f64,
    sample_rate_hz: u32,
    seed: u64,
) -> Result<Recording> {
    let n = sample_count(duration_s, sample_rate_hz)?;
    let ids = roster_ids(setup)?;
    validate_label(&profile.label)?;
    for (ch, lines) in &profile.lines {
        if !ids.contains(&ch.as_str()) {
            return Err(Error::Config(format!(
                "profile {:?} references unknown channel {ch:?}",
                profile.label
            )));
        }
        for line in lines {
            line.validate()?;
        }
    }
    if !profile.noise_rms.is_finite() || profile.noise_rms < 0.0 {
        return Err(Error::Validation(format!(
            "noise_rms {} must be finite and nonnegative",
            profile.noise_rms
        )));
    }

    let rate = f64::from(sample_rate_hz);
    let seconds = n.div_ceil(sample_rate_hz as usize);
    let mut samples = Vec::with_capacity(setup.len());
    for ch in setup {
        let mut rng = rng_from(derive_seed(seed, &[tag(&ch.id)]));
        let mut out = vec![0.0; n];
        for line in profile.lines.get(&ch.id).into_iter().flatten() {
            let phase0 = rng.random_range(0.0..TAU);
            let wobble: Vec<f64> = if line.jitter_hz > 0.0 {
                let dist = Normal::new(0.0, line.jitter_hz)
                    .map_err(|e| Error::Validation(e.to_string()))?;
                (0..seconds).map(|_| dist.sample(&mut rng)).collect()
            } else {
                vec![0.0; seconds]
            };
            let f = f64::from(line.freq_hz);
            // Phase offset accumulated by the wobble of completed seconds.
            let mut wobble_cycles = 0.0;
            for (sec, chunk) in out.chunks_mut(sample_rate_hz as usize).enumerate() {
                let w = wobble[sec];
                let base = sec * sample_rate_hz as usize;
                for (k, x) in chunk.iter_mut().enumerate() {
                    let idx = (base + k) as f64;
                    let cycles = f * idx / rate + wobble_cycles + w * k as f64 / rate;
                    *x += line.amplitude * (TAU * cycles + phase0).sin();
                }
                wobble_cycles += w;
            }
        }
        if profile.noise_rms > 0.0 {
            let dist = Normal::new(0.0, profile.noise_rms)
                .map_err(|e| Error::Validation(e.to_string()))?;
            for x in &mut out {
                *x += dist.sample(&mut rng);
            }
        }
        samples.push(out);
    }

    Ok(Recording {
        label: profile.label.clone(),
        sample_rate_hz,
        channel_ids: ids.into_iter().map(String::from).collect(),
        samples,
        duration_s,
    })
}

/// Knobs for randomized group profiles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ProfileOptions {
    pub noise_rms: f64,
    pub min_amplitude: f64,
    pub max_amplitude: f64,
    pub min_lines: usize,
    pub max_lines: usize,
    pub jitter_hz: f64,
    /// Minimum spacing between line frequencies of different targets.
    /// Lower values make targets harder to separate.
    pub min_line_sep_hz: u32,
    /// Range of engine fundamentals; lines are drawn from their harmonics.
    pub min_fundamental_hz: u32,
    pub max_fundamental_hz: u32,
    /// Background lines present in every profile, on every channel.
    pub ambient_lines: Vec<(u32, f64)>,
    /// Probability that a target line also shows up on a channel outside
    /// the group's selected set.
    pub off_channel_prob: f64,
}

impl Default for ProfileOptions {
    fn default() -> Self {
        Self {
            noise_rms: 1.0,
            min_amplitude: 0.12,
            max_amplitude: 0.36,
            min_lines: 8,
            max_lines: 12,
            jitter_hz: DEFAULT_JITTER_HZ,
            min_line_sep_hz: 3,
            min_fundamental_hz: 6,
            max_fundamental_hz: 45,
            ambient_lines: vec![(60, 0.2), (120, 0.1), (180, 0.05)],
            off_channel_prob: 0.5,
        }
    }
}

pub fn build_group_profiles(group: Group, seed: u64) -> Vec<TargetProfile> {
    build_group_profiles_with(group, &ProfileOptions::default(), seed)
        .expect("default profile options are valid")
}

/// Builds one profile per target of `group`. The first is the background
/// class; every other target gets its own set of harmonic lines kept at least
/// `min_line_sep_hz` away from every other target's lines.
pub fn build_group_profiles_with(
    group: Group,
    opts: &ProfileOptions,
    seed: u64,
) -> Result<Vec<TargetProfile>> {
    if opts.min_lines < 3 || opts.max_lines < opts.min_lines {
        return Err(Error::Config(
            "profile line counts need 3 <= min_lines <= max_lines".into(),
        ));
    }
    if !(opts.min_amplitude > 0.0 && opts.max_amplitude >= opts.min_amplitude) {
        return Err(Error::Config("profile amplitude range is empty".into()));
    }
    if opts.min_fundamental_hz == 0 || opts.max_fundamental_hz < opts.min_fundamental_hz {
        return Err(Error::Config("fundamental range is empty".into()));
    }
    let roster = standard_roster();
    let selected = group.selected_channels();
    let off_channels: Vec<&str> = roster
        .iter()
        .map(|c| c.id.as_str())
        .filter(|id| !selected.contains(id))
        .collect();
    let sep = opts.min_line_sep_hz.max(1);
    let mut rng = rng_from(derive_seed(seed, &[tag("profiles"), tag(&group.to_string())]));

    let mut used: Vec<u32> = opts.ambient_lines.iter().map(|&(f, _)| f).collect();
    let is_free = |used: &[u32], f: u32| used.iter().all(|&u| u.abs_diff(f) >= sep);

    let mut profiles = Vec::with_capacity(group.labels().len());
    for (idx, &label) in group.labels().iter().enumerate() {
        let mut profile = TargetProfile::new(label, opts.noise_rms);
        for ch in &roster {
            for &(f, a) in &opts.ambient_lines {
                profile = profile.with_line(&ch.id, SpectralLine::new(f, a, 0.0));
            }
        }
        if idx == 0 {
            profiles.push(profile);
            continue;
        }

        let want = rng.random_range(opts.min_lines..=opts.max_lines);
        let mut freqs: Vec<u32> = Vec::with_capacity(want);
        for _attempt in 0..64 {
            let f0 = rng.random_range(opts.min_fundamental_hz..=opts.max_fundamental_hz);
            let mut harmonics: Vec<u32> = (1..)
                .map(|k| k * f0)
                .take_while(|&f| f <= MAX_FREQ_HZ as u32)
                .filter(|&f| is_free(&used, f))
                .collect();
            if harmonics.len() >= want {
                harmonics.shuffle(&mut rng);
                harmonics.truncate(want);
                freqs = harmonics;
                break;
            }
        }
        // Fall back to free frequencies anywhere in the band.
        let mut guard = 0;
        while freqs.len() < want && guard < 10_000 {
            guard += 1;
            let f = rng.random_range(1..=MAX_FREQ_HZ as u32);
            if is_free(&used, f) && is_free(&freqs, f) {
                freqs.push(f);
            }
        }
        if freqs.len() < 3 {
            return Err(Error::Config(format!(
                "band too crowded to place lines for {label}; lower min_line_sep_hz"
            )));
        }
        freqs.sort_unstable();
        used.extend(&freqs);

        let mut touched = BTreeSet::new();
        let mut first = None;
        for &f in &freqs {
            let amp = rng.random_range(opts.min_amplitude..=opts.max_amplitude);
            let n_ch = rng.random_range(1..=selected.len());
            for &ch in selected.choose_multiple(&mut rng, n_ch) {
                touched.insert(ch);
                profile = profile.with_line(ch, SpectralLine::new(f, amp, opts.jitter_hz));
            }
            first.get_or_insert((f, amp));
            if rng.random_bool(opts.off_channel_prob.clamp(0.0, 1.0)) {
                if let Some(ch) = off_channels.choose(&mut rng) {
                    profile = profile.with_line(ch, SpectralLine::new(f, amp * 2.0, opts.jitter_hz));
                }
            }
        }
        // At least two selected channels must carry the signature.
        if touched.len() < 2 && selected.len() >= 2 {
            let (f, amp) = first.expect("at least three lines");
            let other = selected
                .iter()
                .find(|c| !touched.contains(*c))
                .expect("an untouched channel");
            profile = profile.with_line(other, SpectralLine::new(f, amp, opts.jitter_hz));
        }
        profiles.push(profile);
    }
    Ok(profiles)
}

#[derive(Serialize, Deserialize)]
struct ProfileFile {
    #[serde(rename = "profile")]
    profiles: Vec<TargetProfile>,
}

pub fn write_profiles(path: &Path, profiles: &[TargetProfile]) -> Result<()> {
    let text = toml::to_string_pretty(&ProfileFile {
        profiles: profiles.to_vec(),
    })
    .map_err(|e| Error::Config(format!("cannot serialize profiles: {e}")))?;
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn read_profiles(path: &Path) -> Result<Vec<TargetProfile>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let file: ProfileFile = toml::from_str(&text).map_err(|e| {
        let line = e
            .span()
            .map_or(0, |s| text[..s.start].matches('\n').count() + 1);
        Error::parse(path, line, e.message().to_string())
    })?;
    Ok(file.profiles)
}

const RECORDING_MAGIC: &str = "sigclass-recording";

/// Writes a recording: one ASCII header line, then one row per time step of
/// little-endian f64 samples in channel order.
pub fn write_recording(path: &Path, rec: &Recording) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    let io = |e| Error::io(path, e);
    writeln!(
        w,
        "{RECORDING_MAGIC} v1 label={} rate={} samples={} channels={}",
        rec.label,
        rec.sample_rate_hz,
        rec.len(),
        rec.channel_ids.join(",")
    )
    .map_err(io)?;
    for t in 0..rec.len() {
        for ch in &rec.samples {
            w.write_all(&ch[t].to_le_bytes()).map_err(io)?;
        }
    }
    w.flush().map_err(io)
}

pub fn read_recording(path: &Path) -> Result<Recording> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut r = BufReader::new(file);
    let mut header = String::new();
    r.read_line(&mut header).map_err(|e| Error::io(path, e))?;
    let mut fields = header.split_whitespace();
    if fields.next() != Some(RECORDING_MAGIC) || fields.next() != Some("v1") {
        return Err(Error::parse(path, 1, "not a v1 recording file"));
    }
    let mut label = None;
    let mut rate = None;
    let mut samples = None;
    let mut channels = None;
    for kv in fields {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| Error::parse(path, 1, format!("bad header field {kv:?}")))?;
        let bad = |_| Error::parse(path, 1, format!("bad value for {k}"));
        match k {
            "label" => label = Some(v.to_string()),
            "rate" => rate = Some(v.parse::<u32>().map_err(bad)?),
            "samples" => samples = Some(v.parse::<usize>().map_err(bad)?),
            "channels" => channels = Some(v.split(',').map(String::from).collect::<Vec<_>>()),
            _ => {}
        }
    }
    let (Some(label), Some(rate), Some(n), Some(channel_ids)) = (label, rate, samples, channels)
    else {
        return Err(Error::parse(path, 1, "header missing label/rate/samples/channels"));
    };
    if rate == 0 {
        return Err(Error::parse(path, 1, "rate must be positive"));
    }
    let width = channel_ids.len();
    let mut raw = vec![0u8; n * width * 8];
    r.read_exact(&mut raw)
        .map_err(|_| Error::parse(path, 2, "sample data truncated"))?;
    let mut samples = vec![Vec::with_capacity(n); width];
    for (i, chunk) in raw.chunks_exact(8).enumerate() {
        let v = f64::from_le_bytes(chunk.try_into().expect("8-byte chunk"));
        samples[i % width].push(v);
    }
    Ok(Recording {
        label,
        sample_rate_hz: rate,
        channel_ids,
        samples,
        duration_s: n as f64 / f64::from(rate),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_channel() -> Vec<SensorChannel> {
        vec![SensorChannel::new("mic", SensorKind::Microphone, "front")]
    }

    #[test]
    fn silent_profile_gives_zeros() {
        let rec = synthesize_recording(&TargetProfile::new("AllQuiet", 0.0), &one_channel(), 2.0, 1000, 1)
            .unwrap();
        assert_eq!(rec.len(), 2000);
        assert!(rec.samples[0].iter().all(|&x| x == 0.0));
    }

    #[test]
    fn single_line_rms_is_one_over_root_two() {
        let p = TargetProfile::new("Tone", 0.0).with_line("mic", SpectralLine::new(100, 1.0, 0.0));
        let rec = synthesize_recording(&p, &one_channel(), 1.0, 1000, 3).unwrap();
        let ms = rec.samples[0].iter().map(|x| x * x).sum::<f64>() / rec.len() as f64;
        assert!((ms.sqrt() - 1.0 / 2f64.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn unknown_channel_is_config_error() {
        let p = TargetProfile::new("X", 0.0).with_line("nope", SpectralLine::new(10, 1.0, 0.0));
        let err = synthesize_recording(&p, &one_channel(), 1.0, 1000, 0).unwrap_err();
        assert!(matches!(err, Error::Config(_)));
    }

    #[test]
    fn non_finite_amplitude_is_validation_error() {
        let p = TargetProfile::new("X", 0.0).with_line("mic", SpectralLine::new(10, f64::NAN, 0.0));
        let err = synthesize_recording(&p, &one_channel(), 1.0, 1000, 0).unwrap_err();
        assert!(matches!(err, Error::Validation(_)));
    }

    #[test]
    fn rejects_short_or_slow_recordings() {
        let p = TargetProfile::new("X", 1.0);
        assert!(synthesize_recording(&p, &one_channel(), 0.5, 1000, 0).is_err());
        assert!(synthesize_recording(&p, &one_channel(), 1.0, 599, 0).is_err());
        assert!(synthesize_recording(&p, &one_channel(), 1.0005, 1000, 0).is_err());
    }

    #[test]
    fn group_profile_counts_and_labels() {
        let g1 = build_group_profiles(Group::Group1, 5);
        let g2 = build_group_profiles(Group::Group2, 5);
        assert_eq!(g1.len(), 7);
        assert_eq!(g2.len(), 4);
        assert_eq!(g2[0].label, "AllQuiet");
        assert_eq!(g1[0].label, "AllQuiet");
    }

    #[test]
    fn group_profiles_are_distinct_and_rich() {
        for group in [Group::Group1, Group::Group2] {
            for seed in 0..20 {
                let ps = build_group_profiles(group, seed);
                let ambient: BTreeSet<u32> = ProfileOptions::default()
                    .ambient_lines
                    .iter()
                    .map(|l| l.0)
                    .collect();
                for p in &ps[1..] {
                    let own: Vec<_> = p
                        .lines
                        .iter()
                        .filter(|(_, ls)| ls.iter().any(|l| !ambient.contains(&l.freq_hz)))
                        .collect();
                    let n_lines = p.frequencies().difference(&ambient).count();
                    assert!(n_lines >= 3, "{} has {n_lines} lines", p.label);
                    assert!(own.len() >= 2, "{} uses {} channels", p.label, own.len());
                }
                for i in 0..ps.len() {
                    for j in i + 1..ps.len() {
                        assert_ne!(ps[i].frequencies(), ps[j].frequencies());
                    }
                }
            }
        }
    }

    #[test]
    fn profiles_are_deterministic() {
        assert_eq!(
            build_group_profiles(Group::Group1, 11),
            build_group_profiles(Group::Group1, 11)
        );
        assert_ne!(
            build_group_profiles(Group::Group1, 11),
            build_group_profiles(Group::Group1, 12)
        );
    }

    #[test]
    fn profile_file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("profiles.toml");
        let ps = build_group_profiles(Group::Group2, 1);
        write_profiles(&path, &ps).unwrap();
        assert_eq!(read_profiles(&path).unwrap(), ps);
    }

    #[test]
    fn recording_file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("rec.bin");
        let roster = standard_roster();
        let p = &build_group_profiles(Group::Group2, 1)[1];
        let rec = synthesize_recording(p, &roster, 2.0, 800, 9).unwrap();
        write_recording(&path, &rec).unwrap();
        assert_eq!(read_recording(&path).unwrap(), rec);
    }
}
