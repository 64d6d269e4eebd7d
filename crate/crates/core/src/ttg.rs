//! Binary `.ttg` time-tag file format.
//!
//! Little-endian layout:
//!
//! | offset | size | field                     |
//! |--------|------|---------------------------|
//! | 0      | 4    | magic `"TTG1"`            |
//! | 4      | 2    | format version, u16 (= 1) |
//! | 6      | 4    | resolution_ps, u32 (= 1)  |
//! | 10     | 8    | duration_ps, u64          |
//! | 18     | 8    | record count, u64         |
//! | 26     | 9·n  | records                   |
//!
//! Each record is `channel: u8` followed by `timestamp_ps: u64`, and records
//! must be sorted by `(timestamp, channel)`. Readers reject bad magic,
//! unknown versions, unsorted records, out-of-range channels or timestamps,
//! and trailing bytes.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::stream::{TimeTag, TimeTagStream};

pub const MAGIC: [u8; 4] = *b"TTG1";
pub const FORMAT_VERSION: u16 = 1;

const RECORD_BYTES: usize = 9;

/// Serializes a stream to a writer.
pub fn write_stream<W: Write>(mut w: W, stream: &TimeTagStream) -> Result<()> {
    w.write_all(&MAGIC)?;
    w.write_all(&FORMAT_VERSION.to_le_bytes())?;
    w.write_all(&stream.resolution_ps().to_le_bytes())?;
    w.write_all(&stream.duration_ps().to_le_bytes())?;
    w.write_all(&(stream.len() as u64).to_le_bytes())?;
    for tag in stream.tags() {
        w.write_all(&[tag.channel])?;
        w.write_all(&tag.timestamp_ps.to_le_bytes())?;
    }
    Ok(())
}

/// Deserializes a stream from a reader, validating the full format.
pub fn read_stream<R: Read>(mut r: R) -> Result<TimeTagStream> {
    let mut magic = [0u8; 4];
    read_exact(&mut r, &mut magic, "magic")?;
    if magic != MAGIC {
        return Err(Error::format(format!(
            "bad magic {:02x?}, expected {:02x?} (\"TTG1\")",
            magic, MAGIC
        )));
    }
    let version = u16::from_le_bytes(read_array(&mut r, "version")?);
    if version != FORMAT_VERSION {
        return Err(Error::format(format!(
            "unknown format version {version}, expected {FORMAT_VERSION}"
        )));
    }
    let resolution = u32::from_le_bytes(read_array(&mut r, "resolution")?);
    if resolution != 1 {
        return Err(Error::format(format!(
            "unsupported resolution {resolution} ps, expected 1"
        )));
    }
    let duration_ps = u64::from_le_bytes(read_array(&mut r, "duration")?);
    let count = u64::from_le_bytes(read_array(&mut r, "record count")?);

    let mut tags = Vec::with_capacity(usize::try_from(count).map_err(|_| {
        Error::format(format!("record count {count} does not fit in memory"))
    })?);
    let mut record = [0u8; RECORD_BYTES];
    for i in 0..count {
        read_exact(&mut r, &mut record, "record")
            .map_err(|_| Error::format(format!("truncated at record {i} of {count}")))?;
        let channel = record[0];
        let timestamp_ps = u64::from_le_bytes(record[1..9].try_into().unwrap());
        tags.push(TimeTag::new(channel, timestamp_ps));
    }
    let mut trailing = [0u8; 1];
    if r.read(&mut trailing)? != 0 {
        return Err(Error::format("trailing bytes after last record"));
    }

    // Stream construction enforces sortedness, channel range, and the
    // timestamp <= duration invariant.
    TimeTagStream::new(tags, duration_ps)
        .map_err(|e| Error::format(format!("invalid records: {e}")))
}

pub fn write_file<P: AsRef<Path>>(path: P, stream: &TimeTagStream) -> Result<()> {
    let file = File::create(path.as_ref())?;
    let mut w = BufWriter::new(file);
    write_stream(&mut w, stream)?;
    w.flush()?;
    Ok(())
}

pub fn read_file<P: AsRef<Path>>(path: P) -> Result<TimeTagStream> {
    let file = File::open(path.as_ref())?;
    read_stream(BufReader::new(file))
}

fn read_exact<R: Read>(r: &mut R, buf: &mut [u8], what: &str) -> Result<()> {
    r.read_exact(buf)
        .map_err(|_| Error::format(format!("truncated header: missing {what}")))
}

fn read_array<R: Read, const N: usize>(r: &mut R, what: &str) -> Result<[u8; N]> {
    let mut buf = [0u8; N];
    read_exact(r, &mut buf, what)?;
    Ok(buf)
}
