//! 8-bit RGB raster I/O. Binary PPM (P6, maxval 255) is the canonical format;
//! PNG is accepted and written through the same entry points.

use std::fs;
use std::io::BufWriter;
use std::path::Path;

use crate::error::{Error, Result};

/// Interleaved 8-bit RGB pixels, row-major from the top-left corner.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RgbImage {
    pub width: usize,
    pub height: usize,
    pub data: Vec<u8>,
}

impl RgbImage {
    pub fn new(width: usize, height: usize, data: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidParameter("image dimensions must be non-zero".into()));
        }
        if data.len() != width * height * 3 {
            return Err(Error::InvalidParameter(format!(
                "expected {} bytes for {width}x{height} RGB, got {}",
                width * height * 3,
                data.len()
            )));
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Format {
    Ppm,
    Png,
}

fn format_of(path: &Path) -> Result<Format> {
    let ext = path
        .extension()
        .and_then(|e| e.to_str())
        .map(|e| e.to_ascii_lowercase());
    match ext.as_deref() {
        Some("ppm") => Ok(Format::Ppm),
        Some("png") => Ok(Format::Png),
        other => Err(Error::UnsupportedFormat(format!(
            "unrecognized extension {:?} for {}",
            other.unwrap_or(""),
            path.display()
        ))),
    }
}

pub fn read_image(path: &Path) -> Result<RgbImage> {
    let format = format_of(path)?;
    let bytes = fs::read(path)?;
    match format {
        Format::Ppm => decode_ppm(&bytes),
        Format::Png => decode_png(&bytes),
    }
}

pub fn write_image(image: &RgbImage, path: &Path) -> Result<()> {
    match format_of(path)? {
        Format::Ppm => fs::write(path, encode_ppm(image))?,
        Format::Png => {
            let file = fs::File::create(path)?;
            let mut encoder = png::Encoder::new(
                BufWriter::new(file),
                image.width as u32,
                image.height as u32,
            );
            encoder.set_color(png::ColorType::Rgb);
            encoder.set_depth(png::BitDepth::Eight);
            let mut writer = encoder.write_header().map_err(png_error)?;
            writer.write_image_data(&image.data).map_err(png_error)?;
            writer.finish().map_err(png_error)?;
        }
    }
    Ok(())
}

/// Canonical P6 encoding: `P6\n<w> <h>\n255\n` followed by the samples.
pub fn encode_ppm(image: &RgbImage) -> Vec<u8> {
    let mut out = format!("P6\n{} {}\n255\n", image.width, image.height).into_bytes();
    out.extend_from_slice(&image.data);
    out
}

struct HeaderCursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl HeaderCursor<'_> {
    fn malformed(&self, reason: impl Into<String>) -> Error {
        Error::MalformedFile {
            offset: self.pos,
            reason: reason.into(),
        }
    }

    fn skip_whitespace_and_comments(&mut self) {
        while self.pos < self.bytes.len() {
            match self.bytes[self.pos] {
                b'#' => {
                    while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                        self.pos += 1;
                    }
                }
                c if c.is_ascii_whitespace() => self.pos += 1,
                _ => break,
            }
        }
    }

    fn number(&mut self, what: &str) -> Result<usize> {
        self.skip_whitespace_and_comments();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.malformed(format!("expected {what}")));
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::MalformedFile {
                offset: start,
                reason: format!("{what} out of range"),
            })
    }
}

pub fn decode_ppm(bytes: &[u8]) -> Result<RgbImage> {
    let mut cur = HeaderCursor { bytes, pos: 0 };
    if bytes.len() < 2 || bytes[0] != b'P' {
        return Err(cur.malformed("missing PPM magic number"));
    }
    match bytes[1] {
        b'6' => {}
        b'1'..=b'5' | b'7' => {
            return Err(Error::UnsupportedFormat(format!(
                "netpbm P{} (only binary P6 is supported)",
                bytes[1] as char
            )))
        }
        _ => return Err(cur.malformed("missing PPM magic number")),
    }
    cur.pos = 2;
    let width = cur.number("width")?;
    let height = cur.number("height")?;
    let maxval = cur.number("maxval")?;
    if width == 0 || height == 0 {
        return Err(cur.malformed("zero image dimension"));
    }
    if maxval != 255 {
        return Err(Error::UnsupportedFormat(format!("PPM maxval {maxval} (expected 255)")));
    }
    match bytes.get(cur.pos) {
        Some(c) if c.is_ascii_whitespace() => cur.pos += 1,
        _ => return Err(cur.malformed("expected single whitespace after maxval")),
    }
    let needed = width
        .checked_mul(height)
        .and_then(|n| n.checked_mul(3))
        .ok_or_else(|| cur.malformed("image dimensions overflow"))?;
    let data = &bytes[cur.pos..];
    if data.len() < needed {
        return Err(Error::MalformedFile {
            offset: bytes.len(),
            reason: format!("truncated pixel data: need {needed} bytes, have {}", data.len()),
        });
    }
    if data.len() > needed {
        return Err(Error::MalformedFile {
            offset: cur.pos + needed,
            reason: "trailing bytes after pixel data".into(),
        });
    }
    RgbImage::new(width, height, data.to_vec())
}

fn png_error(e: impl std::fmt::Display) -> Error {
    Error::MalformedFile {
        offset: 0,
        reason: format!("png: {e}"),
    }
}

fn decode_png(bytes: &[u8]) -> Result<RgbImage> {
    let decoder = png::Decoder::new(std::io::Cursor::new(bytes));
    let mut reader = decoder.read_info().map_err(png_error)?;
    let size = reader
        .output_buffer_size()
        .ok_or_else(|| png_error("image too large"))?;
    let mut buf = vec![0u8; size];
    let info = reader.next_frame(&mut buf).map_err(png_error)?;
    if info.bit_depth != png::BitDepth::Eight {
        return Err(Error::UnsupportedFormat(format!(
            "PNG bit depth {:?} (only 8-bit is supported)",
            info.bit_depth
        )));
    }
    let (w, h) = (info.width as usize, info.height as usize);
    let pixels = &buf[..info.buffer_size()];
    let data = match info.color_type {
        png::ColorType::Rgb => pixels.to_vec(),
        png::ColorType::Rgba => pixels
            .chunks_exact(4)
            .flat_map(|p| [p[0], p[1], p[2]])
            .collect(),
        png::ColorType::Grayscale => pixels.iter().flat_map(|&v| [v, v, v]).collect(),
        other => {
            return Err(Error::UnsupportedFormat(format!("PNG color type {other:?}")));
        }
    };
    RgbImage::new(w, h, data)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_ppm_round_trip() {
        let img = RgbImage::new(2, 2, vec![0, 1, 2, 10, 20, 30, 100, 150, 200, 255, 254, 253]).unwrap();
        let bytes = encode_ppm(&img);
        assert_eq!(&bytes[..11], b"P6\n2 2\n255\n");
        let back = decode_ppm(&bytes).unwrap();
        assert_eq!(back, img);
        assert_eq!(encode_ppm(&back), bytes);
    }

    #[test]
    fn header_with_comments() {
        let mut bytes = b"P6 # made by hand\n1\n# comment\n1 255\n".to_vec();
        bytes.extend_from_slice(&[255, 255, 255]);
        let img = decode_ppm(&bytes).unwrap();
        assert_eq!(img.data, vec![255, 255, 255]);
    }

    #[test]
    fn malformed_inputs_report_offsets() {
        match decode_ppm(b"P6\n2 x\n255\n") {
            Err(Error::MalformedFile { offset, .. }) => assert_eq!(offset, 5),
            other => panic!("{other:?}"),
        }
        match decode_ppm(b"P6\n2 2\n255\n\x00\x01") {
            Err(Error::MalformedFile { offset, .. }) => assert_eq!(offset, 13),
            other => panic!("{other:?}"),
        }
        assert!(matches!(decode_ppm(b"P3\n1 1\n255\n0 0 0"), Err(Error::UnsupportedFormat(_))));
        assert!(matches!(decode_ppm(b"P6\n1 1\n65535\n"), Err(Error::UnsupportedFormat(_))));
        assert!(matches!(decode_ppm(b"GIF89a"), Err(Error::MalformedFile { offset: 0, .. })));
    }

    #[test]
    fn png_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x.png");
        let img = RgbImage::new(3, 1, vec![1, 2, 3, 4, 5, 6, 7, 8, 9]).unwrap();
        write_image(&img, &path).unwrap();
        assert_eq!(read_image(&path).unwrap(), img);
        assert!(matches!(
            read_image(&dir.path().join("x.bmp")),
            Err(Error::UnsupportedFormat(_))
        ));
    }
}
