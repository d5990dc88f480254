//! The `PIC1` container.
//!
//! All integers are little-endian.
//!
//! | offset | size | field                                               |
//! |--------|------|-----------------------------------------------------|
//! | 0      | 4    | magic `PIC1`                                        |
//! | 4      | 4    | width (u32)                                         |
//! | 8      | 4    | height (u32)                                        |
//! | 12     | 1    | layout: 0 gray, 1 color per-channel, 2 color shared |
//! | 13     | 1    | decode mode: 0 stationary, 1 parabolic, 2 homogeneous |
//! | 14     | 8    | alpha (f64)                                         |
//! | 22     | 8    | dt (f64)                                            |
//! | 30     | 4    | decode steps (u32)                                  |
//! | 34     | 1    | number of masks `m` (1 or 3)                        |
//! |        |      | `m` times: block length (u32), then a PBM (P4) file |
//! |        | 1    | number of payloads `p` (1 or 3)                     |
//! |        |      | `p` times: length (u32), then 8-bit values          |
//!
//! Payload `k` lists the quantized values of channel `k` on its mask in
//! row-major order; with one mask shared by three payloads, every payload
//! uses that mask.

use crate::codec::{CodecConfig, ColorEncoded, ColorStrategy, DecodeMode, Encoded};
use crate::error::{Error, Result};
use crate::image::Mask;
use crate::pnm::{decode_pnm, encode_pbm, Pnm};

pub const MAGIC: &[u8; 4] = b"PIC1";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ContainerLayout {
    Gray,
    ColorPerChannel,
    ColorShared,
}

impl ContainerLayout {
    fn id(self) -> u8 {
        match self {
            ContainerLayout::Gray => 0,
            ContainerLayout::ColorPerChannel => 1,
            ContainerLayout::ColorShared => 2,
        }
    }

    fn from_id(id: u8) -> Result<Self> {
        match id {
            0 => Ok(ContainerLayout::Gray),
            1 => Ok(ContainerLayout::ColorPerChannel),
            2 => Ok(ContainerLayout::ColorShared),
            _ => Err(Error::Container(format!("unknown layout id {id}"))),
        }
    }

    fn counts(self) -> (usize, usize) {
        match self {
            ContainerLayout::Gray => (1, 1),
            ContainerLayout::ColorPerChannel => (3, 3),
            ContainerLayout::ColorShared => (1, 3),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Container {
    pub width: usize,
    pub height: usize,
    pub layout: ContainerLayout,
    pub decode_mode: DecodeMode,
    pub alpha: f64,
    pub dt: f64,
    pub decode_steps: usize,
    pub masks: Vec<Mask>,
    pub payloads: Vec<Vec<u8>>,
}

impl Container {
    pub fn gray(encoded: &Encoded, cfg: &CodecConfig) -> Self {
        Self {
            width: encoded.mask.width(),
            height: encoded.mask.height(),
            layout: ContainerLayout::Gray,
            decode_mode: cfg.decode_mode,
            alpha: cfg.solve.alpha,
            dt: cfg.solve.dt,
            decode_steps: cfg.decode_steps,
            masks: vec![encoded.mask.clone()],
            payloads: vec![encoded.values.clone()],
        }
    }

    pub fn color(encoded: &ColorEncoded, cfg: &CodecConfig) -> Self {
        let layout = match encoded.strategy {
            ColorStrategy::PerChannel => ContainerLayout::ColorPerChannel,
            ColorStrategy::SharedLuminance => ContainerLayout::ColorShared,
        };
        let (width, height) = encoded.masks[0].shape();
        Self {
            width,
            height,
            layout,
            decode_mode: cfg.decode_mode,
            alpha: cfg.solve.alpha,
            dt: cfg.solve.dt,
            decode_steps: cfg.decode_steps,
            masks: encoded.masks.clone(),
            payloads: encoded.payloads.to_vec(),
        }
    }

    /// Decoder settings stored in the container on top of `base`.
    pub fn codec_config(&self, base: &CodecConfig) -> CodecConfig {
        let mut cfg = *base;
        cfg.decode_mode = self.decode_mode;
        cfg.decode_steps = self.decode_steps;
        cfg.solve.alpha = self.alpha;
        cfg.solve.dt = self.dt;
        cfg.strategy.alpha = self.alpha;
        cfg.strategy.dt = self.dt;
        cfg
    }

    pub fn gray_encoded(&self) -> Result<Encoded> {
        if self.layout != ContainerLayout::Gray {
            return Err(Error::Container("container holds a color image".into()));
        }
        Ok(Encoded {
            mask: self.masks[0].clone(),
            values: self.payloads[0].clone(),
        })
    }

    pub fn color_encoded(&self) -> Result<ColorEncoded> {
        let strategy = match self.layout {
            ContainerLayout::Gray => return Err(Error::Container("container holds a gray image".into())),
            ContainerLayout::ColorPerChannel => ColorStrategy::PerChannel,
            ContainerLayout::ColorShared => ColorStrategy::SharedLuminance,
        };
        Ok(ColorEncoded {
            strategy,
            masks: self.masks.clone(),
            payloads: [self.payloads[0].clone(), self.payloads[1].clone(), self.payloads[2].clone()],
        })
    }

    fn check(&self) -> Result<()> {
        let (m, p) = self.layout.counts();
        if self.masks.len() != m || self.payloads.len() != p {
            return Err(Error::Container(format!(
                "layout {:?} needs {m} masks and {p} payloads, got {} and {}",
                self.layout,
                self.masks.len(),
                self.payloads.len()
            )));
        }
        for mask in &self.masks {
            if mask.shape() != (self.width, self.height) {
                return Err(Error::Container("mask size differs from the image size".into()));
            }
        }
        for (k, payload) in self.payloads.iter().enumerate() {
            let mask = &self.masks[if m == 1 { 0 } else { k }];
            if payload.len() != mask.count() {
                return Err(Error::Container(format!(
                    "payload {k} has {} values for {} mask pixels",
                    payload.len(),
                    mask.count()
                )));
            }
        }
        Ok(())
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        self.check()?;
        let dim = |v: usize| {
            u32::try_from(v).map_err(|_| Error::Container(format!("value {v} does not fit in 32 bits")))
        };
        let mut out = Vec::new();
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&dim(self.width)?.to_le_bytes());
        out.extend_from_slice(&dim(self.height)?.to_le_bytes());
        out.push(self.layout.id());
        out.push(self.decode_mode.id());
        out.extend_from_slice(&self.alpha.to_le_bytes());
        out.extend_from_slice(&self.dt.to_le_bytes());
        out.extend_from_slice(&dim(self.decode_steps)?.to_le_bytes());
        out.push(self.masks.len() as u8);
        for mask in &self.masks {
            let pbm = encode_pbm(mask);
            out.extend_from_slice(&dim(pbm.len())?.to_le_bytes());
            out.extend_from_slice(&pbm);
        }
        out.push(self.payloads.len() as u8);
        for payload in &self.payloads {
            out.extend_from_slice(&dim(payload.len())?.to_le_bytes());
            out.extend_from_slice(payload);
        }
        Ok(out)
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader { bytes, pos: 0 };
        if r.take(4)? != MAGIC {
            return Err(Error::Container("missing PIC1 magic".into()));
        }
        let width = r.u32()? as usize;
        let height = r.u32()? as usize;
        let layout = ContainerLayout::from_id(r.u8()?)?;
        let decode_mode = DecodeMode::from_id(r.u8()?)?;
        let alpha = r.f64()?;
        let dt = r.f64()?;
        let decode_steps = r.u32()? as usize;
        let mask_count = r.u8()? as usize;
        let mut masks = Vec::with_capacity(mask_count);
        for _ in 0..mask_count {
            let len = r.u32()? as usize;
            match decode_pnm(r.take(len)?)? {
                Pnm::Bitmap(mask) => masks.push(mask),
                _ => return Err(Error::Container("mask block is not a PBM bitmap".into())),
            }
        }
        let payload_count = r.u8()? as usize;
        let mut payloads = Vec::with_capacity(payload_count);
        for _ in 0..payload_count {
            let len = r.u32()? as usize;
            payloads.push(r.take(len)?.to_vec());
        }
        if r.pos != bytes.len() {
            return Err(Error::Container(format!("{} trailing bytes", bytes.len() - r.pos)));
        }
        let c = Self {
            width,
            height,
            layout,
            decode_mode,
            alpha,
            dt,
            decode_steps,
            masks,
            payloads,
        };
        c.check()?;
        Ok(c)
    }
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|&e| e <= self.bytes.len())
            .ok_or_else(|| Error::Container("truncated container".into()))?;
        let s = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().expect("4 bytes")))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mask::{MaskKind, MaskStrategy};

    fn sample() -> (Encoded, CodecConfig) {
        let mask = Mask::from_indices(10, 3, [0, 7, 12, 29]);
        let cfg = CodecConfig::new(MaskStrategy::new(MaskKind::L2Inc, 0.1, 8.0));
        (Encoded { mask, values: vec![1, 2, 3, 250] }, cfg)
    }

    #[test]
    fn gray_round_trip() {
        let (e, cfg) = sample();
        let bytes = Container::gray(&e, &cfg).to_bytes().unwrap();
        assert_eq!(&bytes[..4], b"PIC1");
        assert_eq!(&bytes[4..8], &10u32.to_le_bytes());
        assert_eq!(&bytes[8..12], &3u32.to_le_bytes());
        let back = Container::from_bytes(&bytes).unwrap();
        assert_eq!(back.gray_encoded().unwrap(), e);
        let restored = back.codec_config(&CodecConfig::new(MaskStrategy::default()));
        assert_eq!(restored.solve.alpha, 8.0);
        assert_eq!(restored.decode_mode, DecodeMode::Parabolic);
        assert!(back.color_encoded().is_err());
    }

    #[test]
    fn color_round_trip() {
        let (e, cfg) = sample();
        let shared = ColorEncoded {
            strategy: ColorStrategy::SharedLuminance,
            masks: vec![e.mask.clone()],
            payloads: [e.values.clone(), vec![4, 5, 6, 7], vec![8, 9, 10, 11]],
        };
        let bytes = Container::color(&shared, &cfg).to_bytes().unwrap();
        assert_eq!(Container::from_bytes(&bytes).unwrap().color_encoded().unwrap(), shared);
    }

    #[test]
    fn corrupt_inputs() {
        let (e, cfg) = sample();
        let bytes = Container::gray(&e, &cfg).to_bytes().unwrap();
        assert!(Container::from_bytes(&bytes[..bytes.len() - 1]).is_err());
        let mut extra = bytes.clone();
        extra.push(0);
        assert!(Container::from_bytes(&extra).is_err());
        let mut magic = bytes.clone();
        magic[0] = b'X';
        assert!(Container::from_bytes(&magic).is_err());
        let mut bad = Container::gray(&e, &cfg);
        bad.payloads[0].pop();
        assert!(bad.to_bytes().is_err());
    }
}
