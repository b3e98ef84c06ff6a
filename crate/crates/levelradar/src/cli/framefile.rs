//! The frame-file binary format: a captured or simulated frame sequence
//! with an optional background capture and optional ground-truth levels.
//!
//! Layout, all little-endian:
//!
//! ```text
//! offset  size  field
//! 0       4     magic "RDRE"
//! 4       4     format version, u32, currently 1
//! 8       4     M, antennas per frame, u32
//! 12      4     K, frequency points per frame, u32
//! 16      4     T, frame count, u32
//! 20      1     flags: bit 0 background present, bit 1 truth present
//! 21      ...   background frame if flagged, then T frames;
//!               each frame is M*K complex samples as interleaved f32
//!               (re, im), antenna-major then frequency
//! ...     4*T   truth levels in meters as f32, if flagged
//! ```
//!
//! Files must have exactly the length the header implies; anything shorter
//! or longer is rejected before allocation. Unknown flag bits are ignored
//! so minor additive revisions stay readable.

use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::radar::Frame;
use crate::scenario::LabeledFrameSequence;

const MAGIC: [u8; 4] = *b"RDRE";
const VERSION: u32 = 1;
const HEADER_LEN: usize = 21;
const FLAG_BACKGROUND: u8 = 1;
const FLAG_TRUTH: u8 = 2;

/// In-memory form of one frame file.
#[derive(Clone, Debug)]
pub struct FrameFile {
    /// Antennas per frame.
    pub num_antennas: usize,
    /// Frequency points per frame.
    pub num_freq_points: usize,
    /// The frame sequence, slots numbered from 0.
    pub frames: Vec<Frame>,
    /// Empty-scene capture at slot -1, when present.
    pub background: Option<Frame>,
    /// Ground-truth level per frame in meters, when present.
    pub truth_levels: Option<Vec<f64>>,
}

impl FrameFile {
    /// Packages a simulated scenario run, background and truth included.
    pub fn from_sequence(sequence: &LabeledFrameSequence) -> FrameFile {
        let (m, k) = (
            sequence.background.num_antennas,
            sequence.background.num_freq_points,
        );
        FrameFile {
            num_antennas: m,
            num_freq_points: k,
            frames: sequence.frames.clone(),
            background: Some(sequence.background.clone()),
            truth_levels: Some(sequence.truth_levels.clone()),
        }
    }

    fn check_shape(&self) -> Result<()> {
        if self.num_antennas == 0 || self.num_freq_points == 0 {
            return Err(Error::InvalidParameter(
                "frame file needs at least one antenna and one frequency point".into(),
            ));
        }
        let mk = self.num_antennas * self.num_freq_points;
        for frame in self.frames.iter().chain(self.background.iter()) {
            if frame.num_antennas != self.num_antennas
                || frame.num_freq_points != self.num_freq_points
                || frame.samples.len() != mk
            {
                return Err(Error::DimensionMismatch {
                    expected: mk,
                    got: frame.samples.len(),
                });
            }
        }
        if let Some(truth) = &self.truth_levels {
            if truth.len() != self.frames.len() {
                return Err(Error::DimensionMismatch {
                    expected: self.frames.len(),
                    got: truth.len(),
                });
            }
        }
        Ok(())
    }

    /// Serializes to the binary format. Samples and truth narrow to f32.
    pub fn encode(&self) -> Result<Vec<u8>> {
        self.check_shape()?;
        let mk = self.num_antennas * self.num_freq_points;
        let t = self.frames.len();
        let mut flags = 0u8;
        if self.background.is_some() {
            flags |= FLAG_BACKGROUND;
        }
        if self.truth_levels.is_some() {
            flags |= FLAG_TRUTH;
        }

        let frame_count = t + usize::from(self.background.is_some());
        let truth_len = if self.truth_levels.is_some() { 4 * t } else { 0 };
        let mut data = Vec::with_capacity(HEADER_LEN + frame_count * mk * 8 + truth_len);
        data.extend_from_slice(&MAGIC);
        data.extend_from_slice(&VERSION.to_le_bytes());
        data.extend_from_slice(&(self.num_antennas as u32).to_le_bytes());
        data.extend_from_slice(&(self.num_freq_points as u32).to_le_bytes());
        data.extend_from_slice(&(t as u32).to_le_bytes());
        data.push(flags);

        for frame in self.background.iter().chain(self.frames.iter()) {
            for sample in &frame.samples {
                data.extend_from_slice(&(sample.re as f32).to_le_bytes());
                data.extend_from_slice(&(sample.im as f32).to_le_bytes());
            }
        }
        if let Some(truth) = &self.truth_levels {
            for &level in truth {
                data.extend_from_slice(&(level as f32).to_le_bytes());
            }
        }
        Ok(data)
    }

    /// Parses the binary format, validating the magic, version, and the
    /// exact byte length implied by the header.
    pub fn decode(data: &[u8]) -> Result<FrameFile> {
        if data.len() < HEADER_LEN {
            return Err(Error::Truncated {
                expected: HEADER_LEN as u64,
                got: data.len() as u64,
            });
        }
        if data[0..4] != MAGIC {
            return Err(Error::BadMagic);
        }
        let word = |at: usize| u32::from_le_bytes(data[at..at + 4].try_into().unwrap());
        let version = word(4);
        if version != VERSION {
            return Err(Error::UnsupportedVersion(version));
        }
        let m = word(8) as usize;
        let k = word(12) as usize;
        let t = word(16) as usize;
        let flags = data[20];
        if m == 0 || k == 0 {
            return Err(Error::InvalidParameter(
                "frame file needs at least one antenna and one frequency point".into(),
            ));
        }
        let has_background = flags & FLAG_BACKGROUND != 0;
        let has_truth = flags & FLAG_TRUTH != 0;

        let mk = m * k;
        let frame_count = t as u64 + u64::from(has_background);
        let expected = HEADER_LEN as u64
            + frame_count * mk as u64 * 8
            + if has_truth { 4 * t as u64 } else { 0 };
        if data.len() as u64 != expected {
            return Err(Error::Truncated {
                expected,
                got: data.len() as u64,
            });
        }

        let mut at = HEADER_LEN;
        let mut read_frame = |slot: i64| -> Frame {
            let mut samples = Vec::with_capacity(mk);
            for _ in 0..mk {
                let re = f32::from_le_bytes(data[at..at + 4].try_into().unwrap());
                let im = f32::from_le_bytes(data[at + 4..at + 8].try_into().unwrap());
                samples.push(Complex64::new(re as f64, im as f64));
                at += 8;
            }
            Frame {
                slot,
                num_antennas: m,
                num_freq_points: k,
                samples,
            }
        };

        let background = has_background.then(|| read_frame(-1));
        let frames: Vec<Frame> = (0..t).map(|slot| read_frame(slot as i64)).collect();
        let truth_levels = has_truth.then(|| {
            (0..t)
                .map(|idx| {
                    let base = at + 4 * idx;
                    f32::from_le_bytes(data[base..base + 4].try_into().unwrap()) as f64
                })
                .collect()
        });

        Ok(FrameFile {
            num_antennas: m,
            num_freq_points: k,
            frames,
            background,
            truth_levels,
        })
    }

    /// Writes the encoded file to `path`.
    pub fn write(&self, path: &Path) -> Result<()> {
        Ok(std::fs::write(path, self.encode()?)?)
    }

    /// Reads and parses the file at `path`.
    pub fn read(path: &Path) -> Result<FrameFile> {
        FrameFile::decode(&std::fs::read(path)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::MountGeometry;
    use crate::radar::default_config;
    use crate::scenario::static_fill_scenario;

    fn sample_file() -> FrameFile {
        let config = default_config();
        let geometry = MountGeometry::default();
        let run =
            static_fill_scenario(&config, &geometry, &[0.0, 0.02, 0.05], Some(20.0), 3).unwrap();
        FrameFile::from_sequence(&run)
    }

    #[test]
    fn round_trip_is_byte_exact() {
        let file = sample_file();
        let bytes = file.encode().unwrap();
        let back = FrameFile::decode(&bytes).unwrap();
        assert_eq!(back.encode().unwrap(), bytes);
        assert_eq!(back.frames.len(), 3);
        assert_eq!(back.num_antennas, 4);
        assert_eq!(back.num_freq_points, 128);
        assert!(back.background.is_some());
        assert_eq!(back.truth_levels.as_ref().unwrap().len(), 3);
    }

    #[test]
    fn decoded_values_are_the_f32_narrowing_of_the_originals() {
        let file = sample_file();
        let back = FrameFile::decode(&file.encode().unwrap()).unwrap();
        for (a, b) in file.frames[1].samples.iter().zip(&back.frames[1].samples) {
            assert_eq!(a.re as f32 as f64, b.re);
            assert_eq!(a.im as f32 as f64, b.im);
        }
        for (a, b) in file
            .truth_levels
            .as_ref()
            .unwrap()
            .iter()
            .zip(back.truth_levels.as_ref().unwrap())
        {
            assert_eq!(*a as f32 as f64, *b);
        }
        assert_eq!(back.background.as_ref().unwrap().slot, -1);
        assert_eq!(back.frames[2].slot, 2);
    }

    #[test]
    fn header_layout_is_pinned() {
        let file = sample_file();
        let bytes = file.encode().unwrap();
        assert_eq!(&bytes[0..4], b"RDRE");
        assert_eq!(u32::from_le_bytes(bytes[4..8].try_into().unwrap()), 1);
        assert_eq!(u32::from_le_bytes(bytes[8..12].try_into().unwrap()), 4);
        assert_eq!(u32::from_le_bytes(bytes[12..16].try_into().unwrap()), 128);
        assert_eq!(u32::from_le_bytes(bytes[16..20].try_into().unwrap()), 3);
        assert_eq!(bytes[20], 0b11);
        let mk = 4 * 128;
        assert_eq!(bytes.len(), 21 + (1 + 3) * mk * 8 + 4 * 3);
    }

    #[test]
    fn optional_sections_can_be_absent() {
        let mut file = sample_file();
        file.background = None;
        file.truth_levels = None;
        let bytes = file.encode().unwrap();
        assert_eq!(bytes[20], 0);
        let back = FrameFile::decode(&bytes).unwrap();
        assert!(back.background.is_none());
        assert!(back.truth_levels.is_none());
        assert_eq!(back.frames.len(), 3);
    }

    #[test]
    fn bad_magic_and_version_are_distinct_errors() {
        let file = sample_file();
        let mut bytes = file.encode().unwrap();
        bytes[0] = b'X';
        assert!(matches!(FrameFile::decode(&bytes), Err(Error::BadMagic)));

        let mut bytes = file.encode().unwrap();
        bytes[4..8].copy_from_slice(&7u32.to_le_bytes());
        assert!(matches!(
            FrameFile::decode(&bytes),
            Err(Error::UnsupportedVersion(7))
        ));
    }

    #[test]
    fn wrong_length_is_rejected_before_parsing() {
        let file = sample_file();
        let bytes = file.encode().unwrap();

        let short = &bytes[..bytes.len() - 1];
        match FrameFile::decode(short) {
            Err(Error::Truncated { expected, got }) => {
                assert_eq!(expected, bytes.len() as u64);
                assert_eq!(got, bytes.len() as u64 - 1);
            }
            other => panic!("expected Truncated, got {other:?}"),
        }

        let mut long = bytes.clone();
        long.push(0);
        assert!(matches!(FrameFile::decode(&long), Err(Error::Truncated { .. })));

        assert!(matches!(
            FrameFile::decode(&bytes[..10]),
            Err(Error::Truncated { .. })
        ));
    }

    #[test]
    fn unknown_flag_bits_are_ignored() {
        let file = sample_file();
        let mut bytes = file.encode().unwrap();
        bytes[20] |= 0b1000_0000;
        let back = FrameFile::decode(&bytes).unwrap();
        assert!(back.background.is_some());
        assert!(back.truth_levels.is_some());
    }

    #[test]
    fn zero_antennas_is_rejected() {
        let file = sample_file();
        let mut bytes = file.encode().unwrap();
        bytes[8..12].copy_from_slice(&0u32.to_le_bytes());
        assert!(FrameFile::decode(&bytes).is_err());
    }

    #[test]
    fn write_and_read_through_the_filesystem() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.rdre");
        let file = sample_file();
        file.write(&path).unwrap();
        let back = FrameFile::read(&path).unwrap();
        assert_eq!(back.encode().unwrap(), file.encode().unwrap());
    }
}
