//! Decoding, encoding and dataset traversal.
//!
//! Input: PNG and PGM/PPM (8-bit gray or RGB, binary `P5`/`P6`), plus JPEG.
//! Output: PNG or PGM/PPM only. Lossy output would make the recorded output
//! digests unreproducible, so JPEG is never written.

use std::fs;
use std::path::{Path, PathBuf};

use image::codecs::png::PngEncoder;
use image::codecs::pnm::{PnmEncoder, PnmSubtype, SampleEncoding};
use image::{DynamicImage, ExtendedColorType, ImageEncoder, ImageError, ImageFormat};
use walkdir::WalkDir;

use crate::error::{Error, Result};
use crate::image::Image;

/// Container formats this crate knows about.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FileFormat {
    Png,
    Jpeg,
    /// Binary PGM (`P5`) or PPM (`P6`).
    Pnm,
}

impl FileFormat {
    pub fn from_path(path: &Path) -> Option<FileFormat> {
        let ext = path.extension()?.to_str()?.to_ascii_lowercase();
        match ext.as_str() {
            "png" => Some(FileFormat::Png),
            "jpg" | "jpeg" => Some(FileFormat::Jpeg),
            "ppm" | "pgm" | "pnm" => Some(FileFormat::Pnm),
            _ => None,
        }
    }
}

pub fn is_supported_input(path: &Path) -> bool {
    FileFormat::from_path(path).is_some()
}

pub fn load_image(path: &Path) -> Result<Image> {
    let format = FileFormat::from_path(path).ok_or_else(|| {
        Error::UnsupportedFormat(format!("{}: unrecognized extension", path.display()))
    })?;
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_image(&bytes, format, path)
}

/// Decodes `bytes` as `format`; `origin` only labels errors.
pub fn decode_image(bytes: &[u8], format: FileFormat, origin: &Path) -> Result<Image> {
    let corrupt = |reason: String| Error::CorruptFile {
        path: origin.to_path_buf(),
        reason,
    };
    let image_format = match format {
        FileFormat::Png => ImageFormat::Png,
        FileFormat::Jpeg => ImageFormat::Jpeg,
        FileFormat::Pnm => {
            if !(bytes.starts_with(b"P5") || bytes.starts_with(b"P6")) {
                return Err(Error::UnsupportedFormat(format!(
                    "{}: only binary PGM (P5) and PPM (P6) are accepted",
                    origin.display()
                )));
            }
            ImageFormat::Pnm
        }
    };
    let decoded =
        image::load_from_memory_with_format(bytes, image_format).map_err(|e| match e {
            ImageError::Unsupported(u) => {
                Error::UnsupportedFormat(format!("{}: {u}", origin.display()))
            }
            other => corrupt(other.to_string()),
        })?;
    let (w, h) = (decoded.width() as usize, decoded.height() as usize);
    match decoded {
        DynamicImage::ImageLuma8(buf) => Image::new(w, h, 1, buf.into_raw()),
        DynamicImage::ImageRgb8(buf) => Image::new(w, h, 3, buf.into_raw()),
        DynamicImage::ImageLuma16(_) | DynamicImage::ImageRgb16(_) => {
            Err(Error::UnsupportedDepth {
                path: origin.to_path_buf(),
            })
        }
        DynamicImage::ImageLumaA16(_) | DynamicImage::ImageRgba16(_) => {
            Err(Error::UnsupportedDepth {
                path: origin.to_path_buf(),
            })
        }
        other => Err(Error::UnsupportedFormat(format!(
            "{}: pixel layout {:?} (alpha and float images are not supported)",
            origin.display(),
            other.color()
        ))),
    }
}

/// Output format implied by `path`'s extension, checked against the image's channels.
pub fn output_format(path: &Path, img: &Image) -> Result<FileFormat> {
    let ext = path
        .extension()
        .and_then(|e| e.to_str())
        .map(str::to_ascii_lowercase)
        .unwrap_or_default();
    match ext.as_str() {
        "png" | "pnm" => Ok(FileFormat::from_path(path).unwrap()),
        "ppm" if img.channels() == 3 => Ok(FileFormat::Pnm),
        "pgm" if img.channels() == 1 => Ok(FileFormat::Pnm),
        "ppm" | "pgm" => Err(Error::UnsupportedFormat(format!(
            "{}: .{ext} cannot hold a {}-channel image",
            path.display(),
            img.channels()
        ))),
        "jpg" | "jpeg" => Err(Error::UnsupportedFormat(format!(
            "{}: JPEG output is refused because lossy encoding breaks digest replay; use .png",
            path.display()
        ))),
        _ => Err(Error::UnsupportedFormat(format!(
            "{}: unrecognized output extension",
            path.display()
        ))),
    }
}

/// Encodes losslessly. `Jpeg` is rejected.
pub fn encode_image(img: &Image, format: FileFormat) -> Result<Vec<u8>> {
    let color = if img.channels() == 1 {
        ExtendedColorType::L8
    } else {
        ExtendedColorType::Rgb8
    };
    let (w, h) = (img.width() as u32, img.height() as u32);
    let mut out = Vec::new();
    let encoded = match format {
        FileFormat::Png => PngEncoder::new(&mut out).write_image(img.data(), w, h, color),
        FileFormat::Pnm => {
            let subtype = if img.channels() == 1 {
                PnmSubtype::Graymap(SampleEncoding::Binary)
            } else {
                PnmSubtype::Pixmap(SampleEncoding::Binary)
            };
            PnmEncoder::new(&mut out)
                .with_subtype(subtype)
                .write_image(img.data(), w, h, color)
        }
        FileFormat::Jpeg => {
            return Err(Error::UnsupportedFormat(
                "JPEG output is refused because lossy encoding breaks digest replay".into(),
            ))
        }
    };
    encoded.map_err(|e| Error::UnsupportedFormat(e.to_string()))?;
    Ok(out)
}

/// Encodes by extension and writes, creating parent directories as needed.
/// Returns the bytes written.
pub fn save_image(img: &Image, path: &Path) -> Result<Vec<u8>> {
    let bytes = encode_image(img, output_format(path, img)?)?;
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    fs::write(path, &bytes).map_err(|e| Error::io(path, e))?;
    Ok(bytes)
}

/// Every supported image under `root`, as `/`-separated relative paths in
/// byte order. Symlinks are not followed.
pub fn list_dataset(root: &Path) -> Result<Vec<String>> {
    let meta = fs::metadata(root).map_err(|e| Error::io(root, e))?;
    if !meta.is_dir() {
        return Err(Error::io(
            root,
            std::io::Error::new(std::io::ErrorKind::NotADirectory, "not a directory"),
        ));
    }
    let mut paths = Vec::new();
    for entry in WalkDir::new(root).follow_links(false) {
        let entry = entry.map_err(|e| {
            let path = e
                .path()
                .map(Path::to_path_buf)
                .unwrap_or_else(|| root.to_path_buf());
            Error::io(path, e.into())
        })?;
        if !entry.file_type().is_file() || !is_supported_input(entry.path()) {
            continue;
        }
        let rel = entry
            .path()
            .strip_prefix(root)
            .expect("walkdir stays under root");
        match relative_string(rel) {
            Some(s) => paths.push(s),
            None => log::warn!("skipping non-UTF-8 path {}", entry.path().display()),
        }
    }
    paths.sort();
    Ok(paths)
}

fn relative_string(rel: &Path) -> Option<String> {
    let parts: Option<Vec<&str>> = rel.components().map(|c| c.as_os_str().to_str()).collect();
    Some(parts?.join("/"))
}

/// Joins a `/`-separated relative path onto `root`.
pub fn join_relative(root: &Path, rel: &str) -> PathBuf {
    rel.split('/')
        .fold(root.to_path_buf(), |acc, part| acc.join(part))
}
