//! Objective (MSE, PSNR) and histogram evaluation of cover/stego pairs.
//!
//! MSE is computed per plane as `(1/MN) Σ (S - C)²` and the scalar MSE is
//! the mean of the three planes. Squared differences are summed exactly in
//! integers and divided once.

use std::fmt;
use std::fmt::Write as _;
use std::str::FromStr;

use crate::error::{Result, StegoError};
use crate::image::{ChannelId, RgbImage};

/// Peak value used in the PSNR numerator.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum CmaxMode {
    /// Always 255.
    #[default]
    Fixed255,
    /// Largest sample value observed across both images.
    Observed,
}

impl CmaxMode {
    pub fn as_str(self) -> &'static str {
        match self {
            CmaxMode::Fixed255 => "255",
            CmaxMode::Observed => "paper",
        }
    }
}

impl fmt::Display for CmaxMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CmaxMode {
    type Err = StegoError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "255" | "fixed" => Ok(CmaxMode::Fixed255),
            "paper" | "observed" => Ok(CmaxMode::Observed),
            other => Err(StegoError::InvalidExperiment(format!(
                "unknown cmax mode {other:?} (expected paper or 255)"
            ))),
        }
    }
}

/// Squared error sums per channel and the derived means.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MseBreakdown {
    pub per_channel_sse: [u64; 3],
    pub per_channel_mse: [f64; 3],
    pub mse: f64,
    pub samples_per_channel: u64,
}

impl MseBreakdown {
    pub fn is_zero(&self) -> bool {
        self.per_channel_sse.iter().all(|&s| s == 0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MetricsReport {
    pub mse: f64,
    pub per_channel_mse: [f64; 3],
    /// `f64::INFINITY` when the images are identical.
    pub psnr_db: f64,
    pub cmax_mode: CmaxMode,
    pub cmax_used: u8,
}

impl MetricsReport {
    /// PSNR as a finite number, or [`StegoError::IdenticalImages`].
    pub fn finite_psnr(&self) -> Result<f64> {
        if self.psnr_db.is_finite() {
            Ok(self.psnr_db)
        } else {
            Err(StegoError::IdenticalImages)
        }
    }
}

pub fn mse(cover: &RgbImage, stego: &RgbImage) -> Result<MseBreakdown> {
    cover.same_dimensions(stego)?;
    let mut sse = [0u64; 3];
    for (c, s) in cover.pixels().iter().zip(stego.pixels()) {
        for ch in 0..3 {
            let d = u64::from(c[ch].abs_diff(s[ch]));
            sse[ch] += d * d;
        }
    }
    let n = cover.pixel_count() as u64;
    let per_channel_mse = sse.map(|s| s as f64 / n as f64);
    let mse = sse.iter().sum::<u64>() as f64 / (3 * n) as f64;
    Ok(MseBreakdown {
        per_channel_sse: sse,
        per_channel_mse,
        mse,
        samples_per_channel: n,
    })
}

/// `10 log10(cmax² / mse)`; infinite for `mse == 0`.
pub fn psnr_from_mse(mse: f64, cmax: f64) -> f64 {
    if mse == 0.0 {
        f64::INFINITY
    } else {
        10.0 * (cmax * cmax / mse).log10()
    }
}

pub fn psnr(cover: &RgbImage, stego: &RgbImage, cmax_mode: CmaxMode) -> Result<MetricsReport> {
    let m = mse(cover, stego)?;
    let cmax_used = match cmax_mode {
        CmaxMode::Fixed255 => 255,
        CmaxMode::Observed => cover.max_sample().max(stego.max_sample()),
    };
    let psnr_db = if m.is_zero() {
        f64::INFINITY
    } else {
        psnr_from_mse(m.mse, f64::from(cmax_used))
    };
    Ok(MetricsReport {
        mse: m.mse,
        per_channel_mse: m.per_channel_mse,
        psnr_db,
        cmax_mode,
        cmax_used,
    })
}

/// 256-bin sample counts for each channel.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Histogram {
    pub bins: [[u64; 256]; 3],
}

impl Histogram {
    pub fn channel(&self, ch: ChannelId) -> &[u64; 256] {
        &self.bins[ch.index()]
    }

    /// CSV with columns `channel,bin,count`, 768 data rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("channel,bin,count\n");
        for ch in ChannelId::ALL {
            for (bin, count) in self.channel(ch).iter().enumerate() {
                let _ = writeln!(out, "{ch},{bin},{count}");
            }
        }
        out
    }
}

pub fn histogram(image: &RgbImage) -> Histogram {
    let mut bins = [[0u64; 256]; 3];
    for px in image.pixels() {
        for ch in 0..3 {
            bins[ch][px[ch] as usize] += 1;
        }
    }
    Histogram { bins }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HistogramDelta {
    /// `|cover[bin] - stego[bin]|` per channel.
    pub per_bin: [[u64; 256]; 3],
    pub per_channel_l1: [u64; 3],
    pub total_l1: u64,
}

pub fn histogram_delta(cover: &RgbImage, stego: &RgbImage) -> Result<HistogramDelta> {
    cover.same_dimensions(stego)?;
    let (a, b) = (histogram(cover), histogram(stego));
    let mut per_bin = [[0u64; 256]; 3];
    let mut per_channel_l1 = [0u64; 3];
    for ch in 0..3 {
        for (bin, slot) in per_bin[ch].iter_mut().enumerate() {
            *slot = a.bins[ch][bin].abs_diff(b.bins[ch][bin]);
            per_channel_l1[ch] += *slot;
        }
    }
    Ok(HistogramDelta {
        per_bin,
        per_channel_l1,
        total_l1: per_channel_l1.iter().sum(),
    })
}

/// One evaluated cover/stego pair, for key-value export.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricsRecord {
    pub method: String,
    pub image: String,
    pub payload_bytes: usize,
    pub report: MetricsReport,
}

/// Formats a PSNR value, spelling out `inf` for identical images.
pub fn format_psnr(db: f64) -> String {
    if db.is_infinite() {
        "inf".to_string()
    } else {
        format!("{db:.4}")
    }
}

impl MetricsRecord {
    pub fn to_key_value(&self) -> String {
        let r = &self.report;
        format!(
            "method={}\nimage={}\npayload_bytes={}\nmse={}\npsnr_db={}\ncmax_mode={}\n",
            self.method,
            self.image,
            self.payload_bytes,
            r.mse,
            if r.psnr_db.is_infinite() {
                "inf".to_string()
            } else {
                r.psnr_db.to_string()
            },
            r.cmax_mode,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn px(w: u32, h: u32, p: Vec<[u8; 3]>) -> RgbImage {
        RgbImage::from_pixels(w, h, p).unwrap()
    }

    fn close(a: f64, b: f64) -> bool {
        ((a - b) / b).abs() < 1e-9
    }

    #[test]
    fn identical_is_zero_and_infinite() {
        let a = RgbImage::from_fn(5, 3, |x, y| [x as u8, y as u8, 7]).unwrap();
        let m = mse(&a, &a).unwrap();
        assert_eq!(m.per_channel_mse, [0.0; 3]);
        let r = psnr(&a, &a, CmaxMode::Fixed255).unwrap();
        assert!(r.psnr_db.is_infinite());
        assert!(matches!(r.finite_psnr(), Err(StegoError::IdenticalImages)));
    }

    #[test]
    fn one_pixel_red_flip() {
        let c = px(1, 1, vec![[143, 10, 10]]);
        let s = px(1, 1, vec![[142, 10, 10]]);
        let m = mse(&c, &s).unwrap();
        assert_eq!(m.per_channel_mse, [1.0, 0.0, 0.0]);
        assert!(close(m.mse, 1.0 / 3.0));
        let r = psnr(&c, &s, CmaxMode::Observed).unwrap();
        assert_eq!(r.cmax_used, 143);
        // 10 log10(143² · 3)
        assert!((r.psnr_db - 47.877_933_296_497_86).abs() < 1e-9);
        let r = psnr(&c, &s, CmaxMode::Fixed255).unwrap();
        assert!((r.psnr_db - 52.902_016_155_875_73).abs() < 1e-9);
    }

    #[test]
    fn two_by_one() {
        let c = px(2, 1, vec![[0, 0, 0], [0, 0, 0]]);
        let s = px(2, 1, vec![[2, 0, 0], [0, 0, 0]]);
        let m = mse(&c, &s).unwrap();
        assert_eq!(m.per_channel_mse[0], 2.0);
        assert!(close(m.mse, 2.0 / 3.0));
    }

    #[test]
    fn mse_one_fixed() {
        assert!((psnr_from_mse(1.0, 255.0) - 48.130_803_608_679_1).abs() < 1e-9);
    }

    #[test]
    fn psnr_decreases_with_mse() {
        let mut last = f64::INFINITY;
        for i in 1..100 {
            let p = psnr_from_mse(i as f64 * 0.1, 255.0);
            assert!(p < last);
            last = p;
        }
    }

    #[test]
    fn dimension_mismatch() {
        let a = RgbImage::filled(2, 2, [0; 3]).unwrap();
        let b = RgbImage::filled(4, 1, [0; 3]).unwrap();
        assert!(matches!(
            mse(&a, &b),
            Err(StegoError::DimensionMismatch(2, 2, 4, 1))
        ));
        assert!(psnr(&a, &b, CmaxMode::Observed).is_err());
        assert!(histogram_delta(&a, &b).is_err());
    }

    #[test]
    fn histograms() {
        let h = histogram(&RgbImage::filled(4, 4, [0; 3]).unwrap());
        for ch in ChannelId::ALL {
            assert_eq!(h.channel(ch)[0], 16);
            assert_eq!(h.channel(ch).iter().sum::<u64>(), 16);
        }
        let h = histogram(&RgbImage::filled(3, 3, [1, 2, 3]).unwrap());
        for (ch, v) in ChannelId::ALL.into_iter().zip([1usize, 2, 3]) {
            let nonzero: Vec<usize> = (0..256).filter(|&b| h.channel(ch)[b] != 0).collect();
            assert_eq!(nonzero, vec![v]);
        }
    }

    #[test]
    fn histogram_delta_single_flip() {
        let c = px(1, 1, vec![[143, 10, 10]]);
        let s = px(1, 1, vec![[142, 10, 10]]);
        let d = histogram_delta(&c, &s).unwrap();
        assert_eq!(d.per_channel_l1, [2, 0, 0]);
        assert_eq!(d.total_l1, 2);
        assert_eq!(d.per_bin[0][142], 1);
        assert_eq!(d.per_bin[0][143], 1);
        assert_eq!(histogram_delta(&c, &c).unwrap().total_l1, 0);
    }

    #[test]
    fn histogram_csv_shape() {
        let csv = histogram(&RgbImage::filled(2, 2, [0, 1, 255]).unwrap()).to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 1 + 768);
        assert_eq!(lines[0], "channel,bin,count");
        assert_eq!(lines[1], "red,0,4");
        assert!(lines.contains(&"green,1,4"));
        assert!(lines.contains(&"blue,255,4"));
    }

    #[test]
    fn key_value_record() {
        let c = px(1, 1, vec![[143, 10, 10]]);
        let s = px(1, 1, vec![[142, 10, 10]]);
        let rec = MetricsRecord {
            method: "cyclic".into(),
            image: "a.png".into(),
            payload_bytes: 0,
            report: psnr(&c, &c, CmaxMode::Observed).unwrap(),
        };
        let kv = rec.to_key_value();
        assert!(kv.contains("psnr_db=inf\n"));
        assert!(kv.contains("cmax_mode=paper\n"));
        let rec = MetricsRecord {
            report: psnr(&c, &s, CmaxMode::Fixed255).unwrap(),
            ..rec
        };
        assert!(rec
            .to_key_value()
            .starts_with("method=cyclic\nimage=a.png\npayload_bytes=0\nmse=0.3333"));
    }
}
