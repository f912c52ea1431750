//! Image ingestion: magic-byte format detection and base64 encoding.

use std::path::Path;

use base64::engine::general_purpose::STANDARD;
use base64::Engine;
use serde::{Deserialize, Serialize};
use thiserror::Error;

const PNG_MAGIC: [u8; 8] = [0x89, b'P', b'N', b'G', 0x0D, 0x0A, 0x1A, 0x0A];
const JPEG_MAGIC: [u8; 3] = [0xFF, 0xD8, 0xFF];

#[derive(Debug, Error)]
pub enum EncodeError {
    #[error("image file not found: {0}")]
    Missing(String),
    #[error("cannot read image {path}: {source}")]
    Unreadable {
        path: String,
        source: std::io::Error,
    },
    #[error("unsupported format: {0} is not a PNG or JPEG file")]
    UnsupportedFormat(String),
}

/// Supported image payload formats, detected by magic bytes rather than
/// file extension.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MediaType {
    Png,
    Jpeg,
}

impl MediaType {
    pub fn as_str(self) -> &'static str {
        match self {
            MediaType::Png => "image/png",
            MediaType::Jpeg => "image/jpeg",
        }
    }

    pub fn detect(bytes: &[u8]) -> Option<MediaType> {
        if bytes.starts_with(&PNG_MAGIC) {
            Some(MediaType::Png)
        } else if bytes.starts_with(&JPEG_MAGIC) {
            Some(MediaType::Jpeg)
        } else {
            None
        }
    }
}

fn read_image_bytes(path: &Path) -> Result<Vec<u8>, EncodeError> {
    std::fs::read(path).map_err(|source| {
        let display = path.display().to_string();
        if source.kind() == std::io::ErrorKind::NotFound {
            EncodeError::Missing(display)
        } else {
            EncodeError::Unreadable {
                path: display,
                source,
            }
        }
    })
}

/// Read a PNG or JPEG file and return its standard base64 payload (RFC
/// 4648 with padding) together with the detected media type.
pub fn encode_image(path: &Path) -> Result<(String, MediaType), EncodeError> {
    let bytes = read_image_bytes(path)?;
    let media_type = MediaType::detect(&bytes)
        .ok_or_else(|| EncodeError::UnsupportedFormat(path.display().to_string()))?;
    Ok((STANDARD.encode(&bytes), media_type))
}

/// Encode any file under a caller-asserted media type, skipping magic
/// detection.
pub fn encode_image_as(
    path: &Path,
    media_type: MediaType,
) -> Result<(String, MediaType), EncodeError> {
    let bytes = read_image_bytes(path)?;
    Ok((STANDARD.encode(&bytes), media_type))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    #[test]
    fn forced_media_type_encodes_canonical_vector() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("man.bin");
        std::fs::File::create(&path)
            .unwrap()
            .write_all(&[0x4D, 0x61, 0x6E])
            .unwrap();
        let (payload, media) = encode_image_as(&path, MediaType::Png).unwrap();
        assert_eq!(payload, "TWFu");
        assert_eq!(media, MediaType::Png);
    }

    #[test]
    fn empty_file_is_unsupported() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("empty.png");
        std::fs::File::create(&path).unwrap();
        assert!(matches!(
            encode_image(&path),
            Err(EncodeError::UnsupportedFormat(_))
        ));
    }

    #[test]
    fn missing_file_is_a_distinct_error() {
        assert!(matches!(
            encode_image(Path::new("/nonexistent/image.png")),
            Err(EncodeError::Missing(_))
        ));
    }

    #[test]
    fn one_pixel_png_round_trips_through_base64() {
        // a real 1x1 PNG, complete with IHDR/IDAT/IEND chunks
        const ONE_PIXEL_PNG_B64: &str = "iVBORw0KGgoAAAANSUhEUgAAAAEAAAABCAYAAAAfFcSJAAAADUlEQVR42mNkYPhfDwAChwGA60e6kgAAAABJRU5ErkJggg==";
        let bytes = STANDARD.decode(ONE_PIXEL_PNG_B64).unwrap();
        assert_eq!(MediaType::detect(&bytes), Some(MediaType::Png));

        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("one.png");
        std::fs::write(&path, &bytes).unwrap();
        let (payload, media) = encode_image(&path).unwrap();
        assert_eq!(media, MediaType::Png);
        assert_eq!(STANDARD.decode(payload).unwrap(), bytes);
    }

    #[test]
    fn jpeg_is_detected_by_magic() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("shot.dat");
        let mut bytes = JPEG_MAGIC.to_vec();
        bytes.extend_from_slice(b"payload");
        std::fs::write(&path, &bytes).unwrap();
        let (_, media) = encode_image(&path).unwrap();
        assert_eq!(media, MediaType::Jpeg);
    }

    proptest::proptest! {
        // decode(encode_image(f)) equals the on-disk bytes for arbitrary
        // payloads behind either magic prefix
        #[test]
        fn base64_round_trips_arbitrary_files(
            payload in proptest::collection::vec(proptest::prelude::any::<u8>(), 0..2048),
            png in proptest::prelude::any::<bool>(),
        ) {
            let dir = tempfile::tempdir().unwrap();
            let path = dir.path().join("f.bin");
            let mut bytes = if png { PNG_MAGIC.to_vec() } else { JPEG_MAGIC.to_vec() };
            bytes.extend_from_slice(&payload);
            std::fs::write(&path, &bytes).unwrap();
            let (encoded, media) = encode_image(&path).unwrap();
            proptest::prop_assert_eq!(
                media,
                if png { MediaType::Png } else { MediaType::Jpeg }
            );
            proptest::prop_assert_eq!(STANDARD.decode(encoded).unwrap(), bytes);
        }
    }
}
