//! Grayscale images (binary PGM), byte histograms, and the centered 2D power
//! spectrum used to compare plain and cipher images.

use num_complex::Complex64;
use thiserror::Error;

use crate::fft;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ImageError {
    #[error("unsupported image format {0:?}; only binary P5 PGM is read")]
    UnsupportedFormat(String),
    #[error("malformed PGM header: {0}")]
    MalformedHeader(String),
    #[error("maxval {0} unsupported; only 255 is read")]
    UnsupportedMaxval(u32),
    #[error("pixel data truncated: expected {expected} bytes, got {got}")]
    Truncated { expected: usize, got: usize },
    #[error("image {width}x{height} does not match {len} pixels")]
    SizeMismatch { width: usize, height: usize, len: usize },
    #[error("{width}x{height} is not a power-of-two size; pad or crop first")]
    NotPowerOfTwo { width: usize, height: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    pixels: Vec<u8>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, pixels: Vec<u8>) -> Result<GrayImage, ImageError> {
        if width == 0 || height == 0 || width * height != pixels.len() {
            return Err(ImageError::SizeMismatch { width, height, len: pixels.len() });
        }
        Ok(GrayImage { width, height, pixels })
    }

    pub fn from_fn(width: usize, height: usize, f: impl Fn(usize, usize) -> u8) -> GrayImage {
        let pixels = (0..height).flat_map(|y| (0..width).map(move |x| (y, x))).map(|(y, x)| f(x, y)).collect();
        GrayImage::new(width, height, pixels).expect("consistent size")
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    pub fn into_pixels(self) -> Vec<u8> {
        self.pixels
    }

    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.pixels[y * self.width + x]
    }

    /// Cyclic shift by `(dx, dy)`.
    pub fn roll(&self, dx: usize, dy: usize) -> GrayImage {
        GrayImage::from_fn(self.width, self.height, |x, y| {
            self.get((x + self.width - dx % self.width) % self.width, (y + self.height - dy % self.height) % self.height)
        })
    }
}

/// Parses a binary (P5) PGM with maxval 255. Comments are skipped.
pub fn load_pgm(bytes: &[u8]) -> Result<GrayImage, ImageError> {
    let mut pos = 0;
    let magic = header_token(bytes, &mut pos)?;
    if magic != "P5" {
        return Err(ImageError::UnsupportedFormat(magic));
    }
    let mut number = |what: &str| -> Result<u32, ImageError> {
        let tok = header_token(bytes, &mut pos)?;
        tok.parse().map_err(|_| ImageError::MalformedHeader(format!("bad {what} {tok:?}")))
    };
    let width = number("width")? as usize;
    let height = number("height")? as usize;
    let maxval = number("maxval")?;
    if width == 0 || height == 0 {
        return Err(ImageError::MalformedHeader(format!("empty image {width}x{height}")));
    }
    if maxval != 255 {
        return Err(ImageError::UnsupportedMaxval(maxval));
    }
    // exactly one whitespace byte separates the header from the raster
    match bytes.get(pos) {
        Some(b) if b.is_ascii_whitespace() => pos += 1,
        _ => return Err(ImageError::MalformedHeader("missing separator before pixel data".into())),
    }
    let expected = width * height;
    let data = &bytes[pos..];
    if data.len() < expected {
        return Err(ImageError::Truncated { expected, got: data.len() });
    }
    GrayImage::new(width, height, data[..expected].to_vec())
}

fn header_token(bytes: &[u8], pos: &mut usize) -> Result<String, ImageError> {
    loop {
        match bytes.get(*pos) {
            Some(b'#') => {
                while bytes.get(*pos).is_some_and(|&b| b != b'\n') {
                    *pos += 1;
                }
            }
            Some(b) if b.is_ascii_whitespace() => *pos += 1,
            Some(_) => break,
            None => return Err(ImageError::MalformedHeader("unexpected end of header".into())),
        }
    }
    let start = *pos;
    while bytes.get(*pos).is_some_and(|b| !b.is_ascii_whitespace() && *b != b'#') {
        *pos += 1;
    }
    Ok(String::from_utf8_lossy(&bytes[start..*pos]).into_owned())
}

pub fn save_pgm(image: &GrayImage) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", image.width, image.height).into_bytes();
    out.extend_from_slice(&image.pixels);
    out
}

pub fn histogram(image: &GrayImage) -> [u64; 256] {
    let mut counts = [0u64; 256];
    for &p in &image.pixels {
        counts[p as usize] += 1;
    }
    counts
}

/// Largest bin over the mean bin count (1.0 for a perfectly flat histogram).
pub fn histogram_peak_ratio(counts: &[u64; 256]) -> f64 {
    let total: u64 = counts.iter().sum();
    let max = counts.iter().copied().max().unwrap_or(0);
    max as f64 / (total as f64 / 256.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fit {
    /// Grow to the next power of two, filling with the mean pixel value.
    Pad,
    /// Keep the top-left power-of-two region.
    Crop,
}

pub fn fit_pow2(image: &GrayImage, fit: Fit) -> GrayImage {
    let size = |v: usize| match fit {
        Fit::Pad => v.next_power_of_two(),
        Fit::Crop => 1 << (usize::BITS - 1 - v.leading_zeros()),
    };
    let (w, h) = (size(image.width), size(image.height));
    let sum: u64 = image.pixels.iter().map(|&p| u64::from(p)).sum();
    let fill = ((sum as f64 / image.pixels.len() as f64).round()) as u8;
    GrayImage::from_fn(w, h, |x, y| if x < image.width && y < image.height { image.get(x, y) } else { fill })
}

/// Squared DFT magnitudes, quadrant-swapped so the zero frequency sits at
/// `(width / 2, height / 2)`.
///
/// The transform is unnormalized, so Parseval reads
/// `sum(power) == width * height * sum(deviation^2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    width: usize,
    height: usize,
    power: Vec<f64>,
}

impl Spectrum {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn power(&self) -> &[f64] {
        &self.power
    }

    pub fn at(&self, x: usize, y: usize) -> f64 {
        self.power[y * self.width + x]
    }

    pub fn dc_index(&self) -> usize {
        (self.height / 2) * self.width + self.width / 2
    }

    /// Log-scaled rendering, brightest bin = 255.
    pub fn to_image(&self) -> GrayImage {
        let logs: Vec<f64> = self.power.iter().map(|p| p.ln_1p()).collect();
        let max = logs.iter().copied().fold(0.0, f64::max);
        let pixels = logs
            .iter()
            .map(|&l| if max > 0.0 { (255.0 * l / max).round() as u8 } else { 0 })
            .collect();
        GrayImage::new(self.width, self.height, pixels).expect("consistent size")
    }
}

/// Power spectrum of the mean-subtracted image.
pub fn power_spectrum(image: &GrayImage) -> Result<Spectrum, ImageError> {
    power_spectrum_with(image, true)
}

pub fn power_spectrum_with(image: &GrayImage, subtract_mean: bool) -> Result<Spectrum, ImageError> {
    let (w, h) = (image.width, image.height);
    if !w.is_power_of_two() || !h.is_power_of_two() {
        return Err(ImageError::NotPowerOfTwo { width: w, height: h });
    }
    let mean = if subtract_mean {
        image.pixels.iter().map(|&p| f64::from(p)).sum::<f64>() / image.pixels.len() as f64
    } else {
        0.0
    };
    let mut data: Vec<Complex64> = image.pixels.iter().map(|&p| Complex64::new(f64::from(p) - mean, 0.0)).collect();
    fft::fft_2d(&mut data, w, h);

    let mut power = vec![0.0; w * h];
    for y in 0..h {
        for x in 0..w {
            let dst = ((y + h / 2) % h) * w + (x + w / 2) % w;
            power[dst] = data[y * w + x].norm_sqr();
        }
    }
    Ok(Spectrum { width: w, height: h, power })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Flatness {
    pub value: f64,
    /// All non-DC bins were zero.
    pub degenerate: bool,
}

/// Geometric over arithmetic mean of the non-DC bins, in `[0, 1]`.
pub fn spectrum_flatness(spectrum: &Spectrum) -> Flatness {
    let dc = spectrum.dc_index();
    let bins = spectrum.power.iter().enumerate().filter(|&(i, _)| i != dc).map(|(_, &p)| p);
    let (mut log_sum, mut sum, mut n, mut any_zero) = (0.0, 0.0, 0usize, false);
    for p in bins {
        if p <= 0.0 {
            any_zero = true;
        } else {
            log_sum += p.ln();
        }
        sum += p;
        n += 1;
    }
    if n == 0 || sum <= 0.0 {
        return Flatness { value: 0.0, degenerate: true };
    }
    if any_zero {
        return Flatness { value: 0.0, degenerate: false };
    }
    let value = ((log_sum / n as f64).exp() / (sum / n as f64)).min(1.0);
    Flatness { value, degenerate: false }
}
