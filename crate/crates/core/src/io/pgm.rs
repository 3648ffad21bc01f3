//! Binary portable graymap (P5, maxval 255), row-major from the top-left.

use crate::error::{Error, Result};
use crate::experiments::ImageGray;
use crate::optics::{SlmMask, SlmSpec};

const MAX_DIM: usize = 1 << 31;

pub fn encode_pgm(width: usize, height: usize, data: &[u8]) -> Result<Vec<u8>> {
    if width > MAX_DIM || height > MAX_DIM || width.checked_mul(height).is_none_or(|n| n > MAX_DIM) {
        return Err(Error::Size { width, height });
    }
    if width == 0 || height == 0 {
        return Err(Error::Format("image must not be empty".into()));
    }
    if data.len() != width * height {
        return Err(Error::Format(format!("{} samples for a {width}x{height} image", data.len())));
    }
    let mut out = format!("P5\n{width} {height}\n255\n").into_bytes();
    out.extend_from_slice(data);
    Ok(out)
}

/// Reads a P5 file with maxval 255; `#` comments are allowed in the header.
pub fn decode_pgm(bytes: &[u8]) -> Result<(usize, usize, Vec<u8>)> {
    let mut pos = 0;
    let mut token = || -> Result<String> {
        loop {
            while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
                pos += 1;
            }
            if pos < bytes.len() && bytes[pos] == b'#' {
                while pos < bytes.len() && bytes[pos] != b'\n' {
                    pos += 1;
                }
                continue;
            }
            break;
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return Err(Error::Format("truncated header".into()));
        }
        Ok(String::from_utf8_lossy(&bytes[start..pos]).into_owned())
    };
    if token()? != "P5" {
        return Err(Error::Format("not a binary graymap (P5)".into()));
    }
    let mut num = |what: &str| -> Result<usize> {
        token()?.parse().map_err(|_| Error::Format(format!("bad {what}")))
    };
    let width = num("width")?;
    let height = num("height")?;
    let maxval = num("maxval")?;
    if maxval != 255 {
        return Err(Error::Format(format!("maxval {maxval}, expected 255")));
    }
    if width > MAX_DIM || height > MAX_DIM || width.checked_mul(height).is_none_or(|n| n > MAX_DIM) {
        return Err(Error::Size { width, height });
    }
    // exactly one whitespace byte separates the header from the raster
    let raster = &bytes[(pos + 1).min(bytes.len())..];
    if raster.len() != width * height {
        return Err(Error::Format(format!("{} raster bytes for a {width}x{height} image", raster.len())));
    }
    Ok((width, height, raster.to_vec()))
}

pub fn mask_to_pgm(mask: &SlmMask) -> Result<Vec<u8>> {
    encode_pgm(mask.n_cols(), mask.n_rows(), mask.levels())
}

pub fn mask_from_pgm(bytes: &[u8], slm: &SlmSpec) -> Result<SlmMask> {
    let (w, h, data) = decode_pgm(bytes)?;
    if w != slm.n_cols || h != slm.n_rows {
        return Err(Error::Format(format!("{w}x{h} graymap for a {}x{} modulator", slm.n_cols, slm.n_rows)));
    }
    SlmMask::from_levels(slm, data)
}

pub fn image_to_pgm(image: &ImageGray) -> Result<Vec<u8>> {
    encode_pgm(image.width, image.height, &image.to_levels())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_zero_mask_layout() {
        let slm = SlmSpec::default();
        let bytes = mask_to_pgm(&SlmMask::new(&slm)).unwrap();
        let header = b"P5\n1024 768\n255\n";
        assert_eq!(&bytes[..header.len()], header);
        assert_eq!(bytes.len(), header.len() + 786_432);
        assert!(bytes[header.len()..].iter().all(|&b| b == 0));
    }

    #[test]
    fn round_trip_with_comment() {
        let data: Vec<u8> = (0..=255).collect();
        let bytes = encode_pgm(16, 16, &data).unwrap();
        assert_eq!(decode_pgm(&bytes).unwrap(), (16, 16, data.clone()));
        let mut commented = b"P5\n# made by hand\n16 16\n255\n".to_vec();
        commented.extend_from_slice(&data);
        assert_eq!(decode_pgm(&commented).unwrap().2, data);
    }

    #[test]
    fn size_and_format_errors() {
        assert!(matches!(encode_pgm(MAX_DIM + 1, 1, &[]), Err(Error::Size { .. })));
        assert!(matches!(encode_pgm(1 << 16, 1 << 16, &[]), Err(Error::Size { .. })));
        assert!(matches!(decode_pgm(b"P2\n1 1\n255\n0"), Err(Error::Format(_))));
        assert!(matches!(decode_pgm(b"P5\n2 2\n255\n\0\0"), Err(Error::Format(_))));
        assert!(matches!(decode_pgm(b"P5\n1 1\n65535\n\0\0"), Err(Error::Format(_))));
    }
}
