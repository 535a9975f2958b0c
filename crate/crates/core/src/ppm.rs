//! Binary PPM (P6) reading and writing. The only frame format the tool
//! speaks: bit-exact, no codec dependencies.

use thiserror::Error;

use crate::types::Frame;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PpmError {
    #[error("malformed PPM header: {0}")]
    MalformedHeader(String),
    #[error("unsupported maxval {0}, only 255 is accepted")]
    MaxvalUnsupported(u64),
    #[error("pixel data truncated: expected {expected} bytes, found {got}")]
    TruncatedPixelData { expected: usize, got: usize },
}

/// Decodes a binary P6 image with `maxval` 255. Header fields may be
/// separated by any whitespace and `#` comments; exactly one whitespace byte
/// separates the maxval from the raw pixel data. The frame index is set to
/// zero; sequence position is the caller's business.
pub fn read_ppm(bytes: &[u8]) -> Result<Frame, PpmError> {
    if bytes.len() < 2 || &bytes[0..2] != b"P6" {
        return Err(PpmError::MalformedHeader("missing P6 magic".into()));
    }
    let mut pos = 2usize;
    let width = read_header_number(bytes, &mut pos)?;
    let height = read_header_number(bytes, &mut pos)?;
    let maxval = read_header_number(bytes, &mut pos)?;
    if maxval != 255 {
        return Err(PpmError::MaxvalUnsupported(maxval));
    }
    if width == 0 || height == 0 {
        return Err(PpmError::MalformedHeader("zero image dimension".into()));
    }
    // Single whitespace byte, then raw data.
    match bytes.get(pos) {
        Some(b) if b.is_ascii_whitespace() => pos += 1,
        _ => {
            return Err(PpmError::MalformedHeader(
                "expected single whitespace before pixel data".into(),
            ))
        }
    }
    let (width32, height32) = (
        u32::try_from(width).map_err(|_| PpmError::MalformedHeader("width too large".into()))?,
        u32::try_from(height).map_err(|_| PpmError::MalformedHeader("height too large".into()))?,
    );
    let expected = (width as usize)
        .checked_mul(height as usize)
        .and_then(|n| n.checked_mul(3))
        .ok_or_else(|| PpmError::MalformedHeader("image dimensions overflow".into()))?;
    let available = bytes.len() - pos;
    if available < expected {
        return Err(PpmError::TruncatedPixelData { expected, got: available });
    }
    let pixels = bytes[pos..pos + expected].to_vec();
    Ok(Frame::new(width32, height32, 0, pixels).expect("buffer length checked above"))
}

fn read_header_number(bytes: &[u8], pos: &mut usize) -> Result<u64, PpmError> {
    // Skip whitespace and '#' comment lines.
    loop {
        match bytes.get(*pos) {
            Some(b) if b.is_ascii_whitespace() => *pos += 1,
            Some(b'#') => {
                while let Some(b) = bytes.get(*pos) {
                    *pos += 1;
                    if *b == b'\n' {
                        break;
                    }
                }
            }
            _ => break,
        }
    }
    let start = *pos;
    while matches!(bytes.get(*pos), Some(b) if b.is_ascii_digit()) {
        *pos += 1;
    }
    if *pos == start {
        return Err(PpmError::MalformedHeader("expected a decimal number".into()));
    }
    std::str::from_utf8(&bytes[start..*pos])
        .ok()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| PpmError::MalformedHeader("unparseable number".into()))
}

/// Encodes the canonical form `P6\n<w> <h>\n255\n` followed by the raw
/// pixel bytes. `read_ppm` inverts this exactly.
pub fn write_ppm(f: &Frame) -> Vec<u8> {
    let header = format!("P6\n{} {}\n255\n", f.width, f.height);
    let mut out = Vec::with_capacity(header.len() + f.as_bytes().len());
    out.extend_from_slice(header.as_bytes());
    out.extend_from_slice(f.as_bytes());
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_minimal_image() {
        let mut data = b"P6\n2 1\n255\n".to_vec();
        data.extend_from_slice(&[255, 0, 0, 0, 255, 0]);
        let f = read_ppm(&data).unwrap();
        assert_eq!((f.width, f.height), (2, 1));
        assert_eq!(f.rgb(0, 0), [255, 0, 0]);
        assert_eq!(f.rgb(1, 0), [0, 255, 0]);
    }

    #[test]
    fn accepts_comments_and_mixed_whitespace() {
        let mut data = b"P6 # a comment\n# another\n 2\t1 # sizes\n255 ".to_vec();
        data.extend_from_slice(&[1, 2, 3, 4, 5, 6]);
        let f = read_ppm(&data).unwrap();
        assert_eq!(f.rgb(1, 0), [4, 5, 6]);
    }

    #[test]
    fn rejects_wrong_maxval() {
        let data = b"P6\n1 1\n65535\n\0\0\0\0\0\0";
        assert_eq!(read_ppm(data).unwrap_err(), PpmError::MaxvalUnsupported(65535));
    }

    #[test]
    fn rejects_truncated_data() {
        let mut data = b"P6\n2 1\n255\n".to_vec();
        data.extend_from_slice(&[255, 0, 0, 0, 255]);
        assert_eq!(
            read_ppm(&data).unwrap_err(),
            PpmError::TruncatedPixelData { expected: 6, got: 5 }
        );
    }

    #[test]
    fn rejects_bad_magic() {
        assert!(matches!(read_ppm(b"P5\n1 1\n255\n\0"), Err(PpmError::MalformedHeader(_))));
    }

    #[test]
    fn canonical_one_pixel_black() {
        let f = Frame::filled(1, 1, 0, [0, 0, 0]);
        let bytes = write_ppm(&f);
        assert_eq!(&bytes[..11], b"P6\n1 1\n255\n");
        assert_eq!(&bytes[11..], &[0, 0, 0]);
    }

    #[test]
    fn write_read_write_is_canonical() {
        let mut f = Frame::filled(3, 2, 4, [10, 20, 30]);
        f.set_rgb(2, 1, [200, 100, 50]);
        let once = write_ppm(&f);
        let back = read_ppm(&once).unwrap();
        assert_eq!(back.as_bytes(), f.as_bytes());
        let twice = write_ppm(&back);
        assert_eq!(once, twice);
    }
}
