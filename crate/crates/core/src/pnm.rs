//! Binary netpbm I/O: PGM (P5) grayscale, PPM (P6) color, PBM (P4) masks.
//!
//! Samples wider than 8 bits (maxval > 255) are big-endian 16-bit words.
//! Intensities are quantized as `round(v * maxval)` after clamping to `[0, 1]`.

use std::fs;
use std::path::Path;

use crate::codec::ColorImage;
use crate::error::{Error, Result};
use crate::image::{ImageGrid, Mask};

/// Any decoded netpbm raster.
#[derive(Debug, Clone, PartialEq)]
pub enum Pnm {
    Gray(ImageGrid),
    Color(ColorImage),
    Bitmap(Mask),
}

struct Header {
    magic: [u8; 2],
    width: usize,
    height: usize,
    maxval: u32,
    data_offset: usize,
}

fn skip_ws_and_comments(buf: &[u8], mut pos: usize) -> usize {
    loop {
        while pos < buf.len() && buf[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if pos < buf.len() && buf[pos] == b'#' {
            while pos < buf.len() && buf[pos] != b'\n' {
                pos += 1;
            }
        } else {
            return pos;
        }
    }
}

fn read_uint(buf: &[u8], pos: usize) -> Result<(u64, usize)> {
    let start = skip_ws_and_comments(buf, pos);
    let mut end = start;
    while end < buf.len() && buf[end].is_ascii_digit() {
        end += 1;
    }
    if end == start {
        return Err(Error::Pnm("expected an unsigned integer in header".into()));
    }
    let text = std::str::from_utf8(&buf[start..end]).expect("ascii digits");
    let value = text
        .parse::<u64>()
        .map_err(|_| Error::Pnm(format!("header value {text} out of range")))?;
    Ok((value, end))
}

fn parse_header(buf: &[u8]) -> Result<Header> {
    if buf.len() < 2 || buf[0] != b'P' {
        return Err(Error::Pnm("missing P magic".into()));
    }
    let magic = [buf[0], buf[1]];
    if !matches!(magic[1], b'4' | b'5' | b'6') {
        return Err(Error::Pnm(format!(
            "unsupported format P{}",
            magic[1] as char
        )));
    }
    let (width, pos) = read_uint(buf, 2)?;
    let (height, mut pos) = read_uint(buf, pos)?;
    let mut maxval = 1;
    if magic[1] != b'4' {
        let (m, p) = read_uint(buf, pos)?;
        pos = p;
        if m == 0 || m > 65535 {
            return Err(Error::Pnm(format!("unsupported maxval {m}")));
        }
        maxval = m as u32;
    }
    // Exactly one whitespace byte separates the header from the raster.
    if pos >= buf.len() || !buf[pos].is_ascii_whitespace() {
        return Err(Error::Pnm("missing whitespace after header".into()));
    }
    Ok(Header {
        magic,
        width: width as usize,
        height: height as usize,
        maxval,
        data_offset: pos + 1,
    })
}

fn read_samples(payload: &[u8], count: usize, maxval: u32) -> Result<Vec<f64>> {
    let bytes_per = if maxval > 255 { 2 } else { 1 };
    let needed = count * bytes_per;
    if payload.len() < needed {
        return Err(Error::Pnm(format!(
            "truncated payload: need {needed} bytes, found {}",
            payload.len()
        )));
    }
    let scale = maxval as f64;
    Ok(if bytes_per == 1 {
        payload[..count].iter().map(|&b| b as f64 / scale).collect()
    } else {
        payload[..needed]
            .chunks_exact(2)
            .map(|c| u16::from_be_bytes([c[0], c[1]]) as f64 / scale)
            .collect()
    })
}

/// Decodes P4, P5 or P6 data.
pub fn decode_pnm(buf: &[u8]) -> Result<Pnm> {
    let h = parse_header(buf)?;
    let payload = &buf[h.data_offset..];
    let n = h.width * h.height;
    match h.magic[1] {
        b'5' => {
            let data = read_samples(payload, n, h.maxval)?;
            Ok(Pnm::Gray(ImageGrid::new(h.width, h.height, data)?))
        }
        b'6' => {
            let data = read_samples(payload, 3 * n, h.maxval)?;
            let channel = |c: usize| {
                ImageGrid::new(h.width, h.height, data.iter().skip(c).step_by(3).copied().collect())
            };
            Ok(Pnm::Color(ColorImage::new(channel(0)?, channel(1)?, channel(2)?)?))
        }
        _ => {
            let row_bytes = h.width.div_ceil(8);
            if payload.len() < row_bytes * h.height {
                return Err(Error::Pnm(format!(
                    "truncated payload: need {} bytes, found {}",
                    row_bytes * h.height,
                    payload.len()
                )));
            }
            let mut bits = Vec::with_capacity(n);
            for y in 0..h.height {
                let row = &payload[y * row_bytes..(y + 1) * row_bytes];
                for x in 0..h.width {
                    bits.push(row[x / 8] & (0x80 >> (x % 8)) != 0);
                }
            }
            Ok(Pnm::Bitmap(Mask::from_bits(h.width, h.height, bits)?))
        }
    }
}

fn quantize(v: f64, maxval: u32) -> u32 {
    (v.clamp(0.0, 1.0) * maxval as f64).round() as u32
}

fn push_sample(out: &mut Vec<u8>, v: f64, maxval: u32) {
    let q = quantize(v, maxval);
    if maxval > 255 {
        out.extend_from_slice(&(q as u16).to_be_bytes());
    } else {
        out.push(q as u8);
    }
}

fn check_maxval(maxval: u32) -> Result<()> {
    if maxval == 0 || maxval > 65535 {
        return Err(Error::Pnm(format!("unsupported maxval {maxval}")));
    }
    Ok(())
}

pub fn encode_pgm(img: &ImageGrid, maxval: u32) -> Result<Vec<u8>> {
    check_maxval(maxval)?;
    let mut out = format!("P5\n{} {}\n{}\n", img.width(), img.height(), maxval).into_bytes();
    for &v in img.data() {
        push_sample(&mut out, v, maxval);
    }
    Ok(out)
}

pub fn encode_ppm(img: &ColorImage, maxval: u32) -> Result<Vec<u8>> {
    check_maxval(maxval)?;
    let (w, h) = img.shape();
    let mut out = format!("P6\n{w} {h}\n{maxval}\n").into_bytes();
    for i in 0..w * h {
        for ch in img.channels() {
            push_sample(&mut out, ch.data()[i], maxval);
        }
    }
    Ok(out)
}

/// PBM rows are packed MSB first and padded to whole bytes; a set bit marks a stored pixel.
pub fn encode_pbm(mask: &Mask) -> Vec<u8> {
    let (w, h) = mask.shape();
    let mut out = format!("P4\n{w} {h}\n").into_bytes();
    out.extend(pack_bits(mask));
    out
}

/// Bit-packed raster of a mask without any header.
pub fn pack_bits(mask: &Mask) -> Vec<u8> {
    let (w, h) = mask.shape();
    let row_bytes = w.div_ceil(8);
    let mut out = vec![0u8; row_bytes * h];
    for y in 0..h {
        for x in 0..w {
            if mask.contains_xy(x, y) {
                out[y * row_bytes + x / 8] |= 0x80 >> (x % 8);
            }
        }
    }
    out
}

/// Reads a grayscale PGM (P5).
pub fn read_pnm(path: impl AsRef<Path>) -> Result<ImageGrid> {
    match decode_pnm(&fs::read(path)?)? {
        Pnm::Gray(img) => Ok(img),
        _ => Err(Error::Pnm("expected a grayscale P5 image".into())),
    }
}

pub fn write_pnm(img: &ImageGrid, path: impl AsRef<Path>, maxval: u32) -> Result<()> {
    fs::write(path, encode_pgm(img, maxval)?)?;
    Ok(())
}

pub fn read_ppm(path: impl AsRef<Path>) -> Result<ColorImage> {
    match decode_pnm(&fs::read(path)?)? {
        Pnm::Color(img) => Ok(img),
        _ => Err(Error::Pnm("expected a color P6 image".into())),
    }
}

pub fn write_ppm(img: &ColorImage, path: impl AsRef<Path>, maxval: u32) -> Result<()> {
    fs::write(path, encode_ppm(img, maxval)?)?;
    Ok(())
}

pub fn read_pbm(path: impl AsRef<Path>) -> Result<Mask> {
    match decode_pnm(&fs::read(path)?)? {
        Pnm::Bitmap(m) => Ok(m),
        _ => Err(Error::Pnm("expected a P4 bitmap".into())),
    }
}

pub fn write_pbm(mask: &Mask, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, encode_pbm(mask))?;
    Ok(())
}
