use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniformly sampled real signal; sample `i` sits at `t0 + i·dt`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Waveform {
    samples: Vec<f64>,
    dt: f64,
    t0: f64,
}

impl Waveform {
    pub fn new(samples: Vec<f64>, dt: f64, t0: f64) -> Result<Self> {
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::InvalidWaveform(format!("dt must be > 0, got {dt}")));
        }
        if samples.len() < 2 {
            return Err(Error::InvalidWaveform(format!(
                "need at least 2 samples, got {}",
                samples.len()
            )));
        }
        if !t0.is_finite() {
            return Err(Error::InvalidWaveform("t0 must be finite".into()));
        }
        Ok(Self { samples, dt, t0 })
    }

    pub fn zeros(len: usize, dt: f64) -> Result<Self> {
        Self::new(vec![0.0; len], dt, 0.0)
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn samples_mut(&mut self) -> &mut [f64] {
        &mut self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn sample_rate(&self) -> f64 {
        1.0 / self.dt
    }

    pub fn time(&self, i: usize) -> f64 {
        self.t0 + i as f64 * self.dt
    }

    pub fn end_time(&self) -> f64 {
        self.time(self.samples.len() - 1)
    }

    /// Nearest sample index for time `t`, clamped to the record.
    pub fn index_of(&self, t: f64) -> usize {
        let x = ((t - self.t0) / self.dt).round();
        x.clamp(0.0, (self.samples.len() - 1) as f64) as usize
    }

    /// Same grid, new samples.
    pub fn with_samples(&self, samples: Vec<f64>) -> Result<Self> {
        Self::new(samples, self.dt, self.t0)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            samples: self.samples.iter().map(|x| x * factor).collect(),
            dt: self.dt,
            t0: self.t0,
        }
    }

    /// Samples `lo..=hi` as a new waveform whose `t0` is the time of `lo`.
    pub fn slice(&self, lo: usize, hi: usize) -> Result<Self> {
        if hi >= self.len() || lo > hi {
            return Err(Error::IndexOutOfRange {
                index: hi,
                len: self.len(),
            });
        }
        Self::new(self.samples[lo..=hi].to_vec(), self.dt, self.time(lo))
    }

    pub fn max_abs(&self) -> f64 {
        self.samples.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn stats(&self) -> Stats {
        stats(&self.samples)
    }
}

/// Summary statistics of a sampled signal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stats {
    pub mean: f64,
    /// Population variance (1/N).
    pub variance: f64,
    pub rms: f64,
    /// Σ s²
    pub energy: f64,
}

pub fn stats(s: &[f64]) -> Stats {
    let n = s.len().max(1) as f64;
    let mean = s.iter().sum::<f64>() / n;
    let variance = s.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    let energy: f64 = s.iter().map(|x| x * x).sum();
    Stats {
        mean,
        variance,
        rms: (energy / n).sqrt(),
        energy,
    }
}

/// Named channels sharing one time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Channels {
    pub names: Vec<String>,
    pub waveforms: Vec<Waveform>,
}

impl Channels {
    pub fn new(names: Vec<String>, waveforms: Vec<Waveform>) -> Result<Self> {
        if names.len() != waveforms.len() || waveforms.is_empty() {
            return Err(Error::InconsistentChannels(
                "need one name per waveform and at least one channel".into(),
            ));
        }
        let first = &waveforms[0];
        for w in &waveforms[1..] {
            if w.len() != first.len() || w.dt() != first.dt() || w.t0() != first.t0() {
                return Err(Error::InconsistentChannels(
                    "channels must share length, dt and t0".into(),
                ));
            }
        }
        Ok(Self { names, waveforms })
    }

    pub fn len(&self) -> usize {
        self.waveforms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.waveforms.is_empty()
    }

    /// `time_s,<name>,...` followed by one row per sample.
    pub fn write_csv<W: Write>(&self, out: &mut W) -> std::io::Result<()> {
        write!(out, "time_s")?;
        for name in &self.names {
            write!(out, ",{name}")?;
        }
        writeln!(out)?;
        let first = &self.waveforms[0];
        for i in 0..first.len() {
            write!(out, "{}", first.time(i))?;
            for w in &self.waveforms {
                write!(out, ",{}", w.samples()[i])?;
            }
            writeln!(out)?;
        }
        Ok(())
    }

    pub fn read_csv<R: BufRead>(input: R) -> Result<Self> {
        let bad = |msg: String| Error::InvalidWaveform(msg);
        let mut lines = input.lines();
        let header = lines
            .next()
            .ok_or_else(|| bad("empty waveform file".into()))?
            .map_err(|e| bad(e.to_string()))?;
        let cols: Vec<&str> = header.trim().split(',').map(str::trim).collect();
        if cols.len() < 2 || cols[0] != "time_s" {
            return Err(bad("header must be `time_s,ch1[,ch2,...]`".into()));
        }
        let names: Vec<String> = cols[1..].iter().map(|s| s.to_string()).collect();
        let mut times = Vec::new();
        let mut data: Vec<Vec<f64>> = vec![Vec::new(); names.len()];
        for (lineno, line) in lines.enumerate() {
            let line = line.map_err(|e| bad(e.to_string()))?;
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != names.len() + 1 {
                return Err(bad(format!("row {} has {} fields", lineno + 2, fields.len())));
            }
            let parse = |s: &str| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|_| bad(format!("row {}: cannot parse `{s}`", lineno + 2)))
            };
            times.push(parse(fields[0])?);
            for (col, f) in data.iter_mut().zip(&fields[1..]) {
                col.push(parse(f)?);
            }
        }
        if times.len() < 2 {
            return Err(bad("need at least 2 rows".into()));
        }
        let dt = (times[times.len() - 1] - times[0]) / (times.len() - 1) as f64;
        for (i, t) in times.iter().enumerate() {
            let expect = times[0] + i as f64 * dt;
            if (t - expect).abs() > 1e-6 * dt {
                return Err(bad(format!("non-uniform sampling at row {}", i + 2)));
            }
        }
        let waveforms = data
            .into_iter()
            .map(|s| Waveform::new(s, dt, times[0]))
            .collect::<Result<Vec<_>>>()?;
        Self::new(names, waveforms)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_grids() {
        assert!(Waveform::new(vec![1.0], 1.0, 0.0).is_err());
        assert!(Waveform::new(vec![1.0, 2.0], 0.0, 0.0).is_err());
        assert!(Waveform::new(vec![1.0, 2.0], -1.0, 0.0).is_err());
    }

    #[test]
    fn time_mapping() {
        let w = Waveform::new(vec![0.0; 11], 0.5, 2.0).unwrap();
        assert_eq!(w.time(4), 4.0);
        assert_eq!(w.end_time(), 7.0);
        assert_eq!(w.index_of(3.2), 2);
        assert_eq!(w.index_of(100.0), 10);
    }

    #[test]
    fn stats_constant() {
        let s = stats(&[-3.0; 8]);
        assert_eq!(s.mean, -3.0);
        assert_eq!(s.variance, 0.0);
        assert_eq!(s.rms, 3.0);
        assert_eq!(s.energy, 72.0);
    }

    #[test]
    fn stats_plus_minus_one() {
        let s = stats(&[1.0, -1.0]);
        assert_eq!((s.mean, s.variance, s.rms, s.energy), (0.0, 1.0, 1.0, 2.0));
    }

    #[test]
    fn stats_sine_rms() {
        let n = 100_000;
        let periods = 50.0;
        let s: Vec<f64> = (0..n)
            .map(|i| (2.0 * std::f64::consts::PI * periods * i as f64 / n as f64).sin())
            .collect();
        assert!((stats(&s).rms - 0.5f64.sqrt()).abs() < 1e-3);
    }

    #[test]
    fn csv_round_trip_preserves_grid() {
        let a = Waveform::new(vec![0.0, 1.5, -2.25, 1e-9], 2e-7, 0.0).unwrap();
        let b = a.scaled(-2.0);
        let ch = Channels::new(vec!["S1".into(), "S2".into()], vec![a, b]).unwrap();
        let mut buf = Vec::new();
        ch.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("time_s,S1,S2\n"));
        let back = Channels::read_csv(std::io::Cursor::new(buf)).unwrap();
        assert_eq!(back.names, ch.names);
        assert_eq!(back.waveforms[1].samples(), ch.waveforms[1].samples());
        assert!((back.waveforms[0].dt() - 2e-7).abs() < 1e-20);
    }

    #[test]
    fn csv_rejects_bad_header() {
        let err = Channels::read_csv(std::io::Cursor::new("t,a\n0,1\n1,2\n")).unwrap_err();
        assert!(matches!(err, Error::InvalidWaveform(_)));
    }
}
