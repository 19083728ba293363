//! ZIP reading and deterministic writing, APPNOTE layout.
//!
//! Parsing trusts the central directory for metadata; local headers are only
//! used to locate payload bytes, and local/central disagreements are
//! surfaced as notes rather than errors. Writing emits local headers and the
//! central directory in entry order, an extended-timestamp field carrying
//! the exact mtime, and ZIP64 records only when required.

use super::{deflate_compress, deflate_decompress, Archive, ArchiveError, Compression, Entry, FormatKind, Parsed, Trailer};

const LOCAL_SIG: u32 = 0x0403_4B50;
const CENTRAL_SIG: u32 = 0x0201_4B50;
const EOCD_SIG: u32 = 0x0605_4B50;
const ZIP64_EOCD_SIG: u32 = 0x0606_4B50;
const ZIP64_LOCATOR_SIG: u32 = 0x0706_4B50;

const EXTRA_ZIP64: u16 = 0x0001;
const EXTRA_EXTENDED_TIMESTAMP: u16 = 0x5455;

const U32_MAX: u64 = 0xFFFF_FFFF;
const U16_MAX: u64 = 0xFFFF;

/// Options for ZIP serialization.
#[derive(Clone, Debug)]
pub struct ZipWriteOptions {
    /// Emit ZIP64 records when sizes, offsets, or the entry count overflow
    /// the classic 32/16-bit fields. When disabled, overflow is an
    /// [`ArchiveError::EntryTooLarge`] instead.
    pub allow_zip64: bool,
}

impl Default for ZipWriteOptions {
    fn default() -> Self {
        ZipWriteOptions { allow_zip64: true }
    }
}

struct Cursor<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(data: &'a [u8], pos: usize) -> Self {
        Cursor { data, pos }
    }

    fn take(&mut self, n: usize) -> Result<&'a [u8], ArchiveError> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.data.len());
        let Some(end) = end else {
            return Err(ArchiveError::Malformed("truncated record".into()));
        };
        let s = &self.data[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u16(&mut self) -> Result<u16, ArchiveError> {
        Ok(u16::from_le_bytes(self.take(2)?.try_into().unwrap()))
    }

    fn u32(&mut self) -> Result<u32, ArchiveError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64, ArchiveError> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
}

// Civil-calendar conversion (days since 1970-01-01, proleptic Gregorian).
fn days_from_civil(y: i64, m: u32, d: u32) -> i64 {
    let y = if m <= 2 { y - 1 } else { y };
    let era = if y >= 0 { y } else { y - 399 } / 400;
    let yoe = y - era * 400;
    let mp = (m as i64 + 9) % 12;
    let doy = (153 * mp + 2) / 5 + d as i64 - 1;
    let doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    era * 146097 + doe - 719468
}

fn civil_from_days(z: i64) -> (i64, u32, u32) {
    let z = z + 719468;
    let era = if z >= 0 { z } else { z - 146096 } / 146097;
    let doe = z - era * 146097;
    let yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    let y = yoe + era * 400;
    let doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    let mp = (5 * doy + 2) / 153;
    let d = (doy - (153 * mp + 2) / 5 + 1) as u32;
    let m = (if mp < 10 { mp + 3 } else { mp - 9 }) as u32;
    (if m <= 2 { y + 1 } else { y }, m, d)
}

/// Epoch seconds to MS-DOS (time, date) words, interpreted as UTC and
/// clamped to the representable 1980..=2107 range, 2-second resolution.
fn dos_from_epoch(mtime: i64) -> (u16, u16) {
    let days = mtime.div_euclid(86_400);
    let secs = mtime.rem_euclid(86_400);
    let (mut y, mut mo, mut d) = civil_from_days(days);
    let (mut h, mut mi, mut s) = ((secs / 3600) as u32, ((secs % 3600) / 60) as u32, (secs % 60) as u32);
    if y < 1980 {
        (y, mo, d, h, mi, s) = (1980, 1, 1, 0, 0, 0);
    } else if y > 2107 {
        (y, mo, d, h, mi, s) = (2107, 12, 31, 23, 59, 58);
    }
    let date = (((y - 1980) as u16) << 9) | ((mo as u16) << 5) | d as u16;
    let time = ((h as u16) << 11) | ((mi as u16) << 5) | (s as u16 >> 1);
    (time, date)
}

fn epoch_from_dos(time: u16, date: u16) -> i64 {
    let y = ((date >> 9) & 0x7F) as i64 + 1980;
    let mo = ((date >> 5) & 0x0F).max(1) as u32;
    let d = (date & 0x1F).max(1) as u32;
    let h = ((time >> 11) & 0x1F) as i64;
    let mi = ((time >> 5) & 0x3F) as i64;
    let s = ((time & 0x1F) as i64) * 2;
    days_from_civil(y, mo, d) * 86_400 + h * 3600 + mi * 60 + s
}

struct Eocd {
    entry_count: u64,
    cd_offset: u64,
    comment: Vec<u8>,
}

fn find_eocd(bytes: &[u8]) -> Result<Eocd, ArchiveError> {
    if bytes.len() < 22 {
        return Err(ArchiveError::Malformed("too short for end-of-central-directory".into()));
    }
    let floor = bytes.len().saturating_sub(22 + 65_535);
    let mut pos = bytes.len() - 22;
    loop {
        if u32::from_le_bytes(bytes[pos..pos + 4].try_into().unwrap()) == EOCD_SIG {
            let mut c = Cursor::new(bytes, pos + 4);
            let _disk = c.u16()?;
            let _cd_disk = c.u16()?;
            let _disk_entries = c.u16()?;
            let total_entries = c.u16()?;
            let _cd_size = c.u32()?;
            let cd_offset = c.u32()?;
            let comment_len = c.u16()? as usize;
            if c.pos + comment_len <= bytes.len() {
                let comment = c.take(comment_len)?.to_vec();
                let mut entry_count = total_entries as u64;
                let mut cd_offset = cd_offset as u64;
                // ZIP64: sentinel values route through the locator record.
                let needs_zip64 = total_entries as u64 == U16_MAX || cd_offset == U32_MAX;
                if needs_zip64
                    && pos >= 20
                    && u32::from_le_bytes(bytes[pos - 20..pos - 16].try_into().unwrap()) == ZIP64_LOCATOR_SIG
                {
                    let z64_off = u64::from_le_bytes(bytes[pos - 12..pos - 4].try_into().unwrap()) as usize;
                    if z64_off + 56 > bytes.len() {
                        return Err(ArchiveError::Malformed("bad ZIP64 end-of-central-directory offset".into()));
                    }
                    let mut z = Cursor::new(bytes, z64_off);
                    if z.u32()? != ZIP64_EOCD_SIG {
                        return Err(ArchiveError::Malformed("missing ZIP64 end-of-central-directory".into()));
                    }
                    let _size = z.u64()?;
                    let _ver = z.u32()?;
                    let _disks = z.u64()?;
                    let _disk_entries = z.u64()?;
                    entry_count = z.u64()?;
                    let _cd_size = z.u64()?;
                    cd_offset = z.u64()?;
                }
                return Ok(Eocd { entry_count, cd_offset, comment });
            }
        }
        if pos == floor || pos == 0 {
            return Err(ArchiveError::Malformed("end-of-central-directory not found".into()));
        }
        pos -= 1;
    }
}

struct ExtraScan {
    kept: Vec<(u16, Vec<u8>)>,
    ut_mtime: Option<i64>,
    zip64: Vec<u64>,
}

fn scan_extra(data: &[u8]) -> ExtraScan {
    let mut out = ExtraScan { kept: Vec::new(), ut_mtime: None, zip64: Vec::new() };
    let mut pos = 0;
    while pos + 4 <= data.len() {
        let tag = u16::from_le_bytes(data[pos..pos + 2].try_into().unwrap());
        let len = u16::from_le_bytes(data[pos + 2..pos + 4].try_into().unwrap()) as usize;
        if pos + 4 + len > data.len() {
            break; // tolerate a ragged trailing field
        }
        let body = &data[pos + 4..pos + 4 + len];
        match tag {
            EXTRA_EXTENDED_TIMESTAMP => {
                if len >= 5 && body[0] & 1 != 0 {
                    out.ut_mtime = Some(i32::from_le_bytes(body[1..5].try_into().unwrap()) as i64);
                } else {
                    out.kept.push((tag, body.to_vec()));
                }
            }
            EXTRA_ZIP64 => {
                let mut i = 0;
                while i + 8 <= body.len() {
                    out.zip64.push(u64::from_le_bytes(body[i..i + 8].try_into().unwrap()));
                    i += 8;
                }
            }
            _ => out.kept.push((tag, body.to_vec())),
        }
        pos += 4 + len;
    }
    out
}

pub(super) fn parse(bytes: &[u8]) -> Result<Parsed, ArchiveError> {
    let eocd = find_eocd(bytes)?;
    let mut notes = Vec::new();
    let mut entries = Vec::with_capacity(eocd.entry_count.min(1 << 16) as usize);
    let mut c = Cursor::new(bytes, eocd.cd_offset as usize);
    if eocd.cd_offset as usize > bytes.len() {
        return Err(ArchiveError::Malformed("central directory offset beyond input".into()));
    }

    for _ in 0..eocd.entry_count {
        if c.u32()? != CENTRAL_SIG {
            return Err(ArchiveError::Malformed("truncated central directory".into()));
        }
        let version_made_by = c.u16()?;
        let _version_needed = c.u16()?;
        let flags = c.u16()?;
        let method = c.u16()?;
        let dos_time = c.u16()?;
        let dos_date = c.u16()?;
        let crc = c.u32()?;
        let mut csize = c.u32()? as u64;
        let mut usize_ = c.u32()? as u64;
        let name_len = c.u16()? as usize;
        let extra_len = c.u16()? as usize;
        let comment_len = c.u16()? as usize;
        let _disk = c.u16()?;
        let _internal = c.u16()?;
        let external = c.u32()?;
        let mut local_offset = c.u32()? as u64;
        let raw_name = c.take(name_len)?.to_vec();
        let extra = c.take(extra_len)?.to_vec();
        let _comment = c.take(comment_len)?;

        if flags & 0x0001 != 0 {
            return Err(ArchiveError::Malformed("encrypted entry".into()));
        }

        let scan = scan_extra(&extra);
        let mut z64 = scan.zip64.iter().copied();
        if usize_ == U32_MAX {
            usize_ = z64.next().ok_or_else(|| ArchiveError::Malformed("missing ZIP64 uncompressed size".into()))?;
        }
        if csize == U32_MAX {
            csize = z64.next().ok_or_else(|| ArchiveError::Malformed("missing ZIP64 compressed size".into()))?;
        }
        if local_offset == U32_MAX {
            local_offset = z64.next().ok_or_else(|| ArchiveError::Malformed("missing ZIP64 local offset".into()))?;
        }

        let compression = match method {
            0 => Compression::Store,
            8 => Compression::Deflate,
            other => return Err(ArchiveError::Malformed(format!("unsupported compression method id {other}"))),
        };

        // Local header only locates the payload; metadata stays central.
        let mut lc = Cursor::new(bytes, local_offset as usize);
        if lc.u32()? != LOCAL_SIG {
            return Err(ArchiveError::Malformed("bad local header signature".into()));
        }
        let _lver = lc.u16()?;
        let _lflags = lc.u16()?;
        let _lmethod = lc.u16()?;
        let l_time = lc.u16()?;
        let l_date = lc.u16()?;
        let _lcrc = lc.u32()?;
        let _lcsize = lc.u32()?;
        let _lusize = lc.u32()?;
        let l_name_len = lc.u16()? as usize;
        let l_extra_len = lc.u16()? as usize;
        let l_name = lc.take(l_name_len)?;
        lc.take(l_extra_len)?;
        let data = lc.take(csize as usize)?;

        let mut path = raw_name.clone();
        for b in path.iter_mut() {
            if *b == b'\\' {
                *b = b'/';
            }
        }
        let display = String::from_utf8_lossy(&path).into_owned();
        if l_name != raw_name.as_slice() {
            notes.push(format!("{display}: local header name disagrees with central directory"));
        }
        if (l_time, l_date) != (dos_time, dos_date) {
            notes.push(format!("{display}: local header timestamp disagrees with central directory"));
        }

        let payload = match compression {
            Compression::Store => {
                if csize != usize_ {
                    return Err(ArchiveError::Malformed(format!("{display}: stored entry size mismatch")));
                }
                data.to_vec()
            }
            Compression::Deflate => deflate_decompress(data, usize_ as usize)?,
        };
        if payload.len() as u64 != usize_ {
            return Err(ArchiveError::Malformed(format!("{display}: decompressed size mismatch")));
        }
        if crc32fast::hash(&payload) != crc {
            return Err(ArchiveError::Malformed(format!("{display}: CRC mismatch")));
        }

        let is_directory = path.ends_with(b"/");
        let unix_mode = if version_made_by >> 8 == 3 { (external >> 16) as u16 } else { 0 };
        let mtime = scan.ut_mtime.unwrap_or_else(|| epoch_from_dos(dos_time, dos_date));

        entries.push(Entry {
            path,
            payload,
            mtime,
            unix_mode,
            owner_user: Vec::new(),
            owner_group: Vec::new(),
            compression,
            extra_fields: scan.kept,
            is_directory,
        });
    }

    let archive = Archive { format: FormatKind::Zip, entries, trailer: Trailer::ZipComment(eocd.comment) };
    Ok(Parsed { archive, notes })
}

fn push_u16(out: &mut Vec<u8>, v: u16) {
    out.extend_from_slice(&v.to_le_bytes());
}

fn push_u32(out: &mut Vec<u8>, v: u32) {
    out.extend_from_slice(&v.to_le_bytes());
}

fn push_u64(out: &mut Vec<u8>, v: u64) {
    out.extend_from_slice(&v.to_le_bytes());
}

fn ut_extra(mtime: i64) -> Vec<u8> {
    let clamped = mtime.clamp(i32::MIN as i64, i32::MAX as i64) as i32;
    let mut f = Vec::with_capacity(9);
    push_u16(&mut f, EXTRA_EXTENDED_TIMESTAMP);
    push_u16(&mut f, 5);
    f.push(1); // mtime present
    f.extend_from_slice(&clamped.to_le_bytes());
    f
}

fn plain_extras(fields: &[(u16, Vec<u8>)]) -> Vec<u8> {
    let mut out = Vec::new();
    for (tag, body) in fields {
        push_u16(&mut out, *tag);
        push_u16(&mut out, body.len() as u16);
        out.extend_from_slice(body);
    }
    out
}

pub(super) fn write(archive: &Archive, options: &ZipWriteOptions) -> Result<Vec<u8>, ArchiveError> {
    let mut out = Vec::new();
    let mut central = Vec::new();

    for entry in &archive.entries {
        let data = match entry.compression {
            Compression::Store => entry.payload.clone(),
            Compression::Deflate => deflate_compress(&entry.payload),
        };
        let crc = crc32fast::hash(&entry.payload);
        let (dos_time, dos_date) = dos_from_epoch(entry.mtime);
        let offset = out.len() as u64;
        let usize_ = entry.payload.len() as u64;
        let csize = data.len() as u64;
        let needs_zip64 = usize_ >= U32_MAX || csize >= U32_MAX || offset >= U32_MAX;
        if needs_zip64 && !options.allow_zip64 {
            return Err(ArchiveError::EntryTooLarge(entry.path_lossy()));
        }
        let method: u16 = match entry.compression {
            Compression::Store => 0,
            Compression::Deflate => 8,
        };
        let version_needed: u16 = if needs_zip64 { 45 } else { 20 };

        let mut local_extra = ut_extra(entry.mtime);
        local_extra.extend_from_slice(&plain_extras(&entry.extra_fields));
        if needs_zip64 {
            push_u16(&mut local_extra, EXTRA_ZIP64);
            push_u16(&mut local_extra, 16);
            push_u64(&mut local_extra, usize_);
            push_u64(&mut local_extra, csize);
        }

        push_u32(&mut out, LOCAL_SIG);
        push_u16(&mut out, version_needed);
        push_u16(&mut out, 0); // flags
        push_u16(&mut out, method);
        push_u16(&mut out, dos_time);
        push_u16(&mut out, dos_date);
        push_u32(&mut out, crc);
        push_u32(&mut out, if needs_zip64 { U32_MAX as u32 } else { csize as u32 });
        push_u32(&mut out, if needs_zip64 { U32_MAX as u32 } else { usize_ as u32 });
        push_u16(&mut out, entry.path.len() as u16);
        push_u16(&mut out, local_extra.len() as u16);
        out.extend_from_slice(&entry.path);
        out.extend_from_slice(&local_extra);
        out.extend_from_slice(&data);

        let mut central_extra = ut_extra(entry.mtime);
        central_extra.extend_from_slice(&plain_extras(&entry.extra_fields));
        if needs_zip64 {
            push_u16(&mut central_extra, EXTRA_ZIP64);
            push_u16(&mut central_extra, 24);
            push_u64(&mut central_extra, usize_);
            push_u64(&mut central_extra, csize);
            push_u64(&mut central_extra, offset);
        }
        let external = ((entry.unix_mode as u32) << 16) | if entry.is_directory { 0x10 } else { 0 };

        push_u32(&mut central, CENTRAL_SIG);
        push_u16(&mut central, (3 << 8) | 20); // made by Unix, tool 2.0
        push_u16(&mut central, version_needed);
        push_u16(&mut central, 0); // flags
        push_u16(&mut central, method);
        push_u16(&mut central, dos_time);
        push_u16(&mut central, dos_date);
        push_u32(&mut central, crc);
        push_u32(&mut central, if needs_zip64 { U32_MAX as u32 } else { csize as u32 });
        push_u32(&mut central, if needs_zip64 { U32_MAX as u32 } else { usize_ as u32 });
        push_u16(&mut central, entry.path.len() as u16);
        push_u16(&mut central, central_extra.len() as u16);
        push_u16(&mut central, 0); // comment len
        push_u16(&mut central, 0); // disk
        push_u16(&mut central, 0); // internal attrs
        push_u32(&mut central, external);
        push_u32(&mut central, if needs_zip64 { U32_MAX as u32 } else { offset as u32 });
        central.extend_from_slice(&entry.path);
        central.extend_from_slice(&central_extra);
    }

    let cd_offset = out.len() as u64;
    let cd_size = central.len() as u64;
    out.extend_from_slice(&central);

    let count = archive.entries.len() as u64;
    let comment: &[u8] = match &archive.trailer {
        Trailer::ZipComment(c) => c,
        _ => &[],
    };
    let needs_zip64 = count > U16_MAX || cd_offset >= U32_MAX || cd_size >= U32_MAX;
    if needs_zip64 && !options.allow_zip64 {
        return Err(ArchiveError::EntryTooLarge(format!("{count} entries exceed the classic central directory limits")));
    }
    if needs_zip64 {
        let z64_offset = out.len() as u64;
        push_u32(&mut out, ZIP64_EOCD_SIG);
        push_u64(&mut out, 44); // record size after this field
        push_u16(&mut out, (3 << 8) | 45);
        push_u16(&mut out, 45);
        push_u32(&mut out, 0);
        push_u32(&mut out, 0);
        push_u64(&mut out, count);
        push_u64(&mut out, count);
        push_u64(&mut out, cd_size);
        push_u64(&mut out, cd_offset);
        push_u32(&mut out, ZIP64_LOCATOR_SIG);
        push_u32(&mut out, 0);
        push_u64(&mut out, z64_offset);
        push_u32(&mut out, 1);
    }
    push_u32(&mut out, EOCD_SIG);
    push_u16(&mut out, 0);
    push_u16(&mut out, 0);
    push_u16(&mut out, count.min(U16_MAX) as u16);
    push_u16(&mut out, count.min(U16_MAX) as u16);
    push_u32(&mut out, cd_size.min(U32_MAX) as u32);
    push_u32(&mut out, cd_offset.min(U32_MAX) as u32);
    push_u16(&mut out, comment.len() as u16);
    out.extend_from_slice(comment);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::archive::{parse_archive, write_archive};

    #[test]
    fn empty_zip_is_the_bare_eocd_record() {
        let archive = Archive { format: FormatKind::Zip, entries: Vec::new(), trailer: Trailer::ZipComment(Vec::new()) };
        let bytes = write_archive(&archive).unwrap();
        // 22-byte end-of-central-directory: signature then all-zero fields.
        assert_eq!(hex::encode(&bytes), "504b0506000000000000000000000000000000000000");
        assert_eq!(bytes.len(), 22);
        let parsed = parse_archive(&bytes).unwrap();
        assert!(parsed.archive.entries.is_empty());
    }

    #[test]
    fn dos_time_round_trips_at_two_second_granularity() {
        // 1980-01-01T00:00:00Z, the DOS floor.
        assert_eq!(dos_from_epoch(315_532_800), (0, (1 << 5) | 1));
        assert_eq!(epoch_from_dos(0, (1 << 5) | 1), 315_532_800);
        for t in [315_532_800i64, 1_647_431_420, 1_735_860_648, 4_000_000_000] {
            let even = t & !1;
            let (time, date) = dos_from_epoch(even);
            assert_eq!(epoch_from_dos(time, date), even, "mtime {even}");
        }
        // Pre-1980 clamps to the floor.
        let (time, date) = dos_from_epoch(0);
        assert_eq!(epoch_from_dos(time, date), 315_532_800);
    }

    fn sample() -> Archive {
        let mut a = Archive::new(FormatKind::Zip);
        a.trailer = Trailer::ZipComment(Vec::new());
        let mut dir = Entry::directory(b"META-INF");
        dir.unix_mode = 0o40755;
        dir.mtime = 1_600_000_000;
        a.entries.push(dir);
        let mut f1 = Entry::file(b"META-INF/MANIFEST.MF", b"Manifest-Version: 1.0\r\n\r\n".to_vec());
        f1.compression = Compression::Deflate;
        f1.mtime = 1_647_431_421;
        f1.unix_mode = 0o100644;
        a.entries.push(f1);
        let mut f2 = Entry::file(b"data.bin", vec![0xAB; 4000]);
        f2.mtime = 1_735_860_649; // odd second, preserved via the UT field
        a.entries.push(f2);
        a
    }

    #[test]
    fn round_trip_preserves_modeled_fields() {
        let a = sample();
        let bytes = write_archive(&a).unwrap();
        let p = parse_archive(&bytes).unwrap();
        assert_eq!(p.archive, a);
        assert!(p.notes.is_empty());
        // And a second trip is byte-identical.
        assert_eq!(write_archive(&p.archive).unwrap(), bytes);
    }

    #[test]
    fn write_is_deterministic_across_repetitions() {
        let a = sample();
        let first = write_archive(&a).unwrap();
        for _ in 0..100 {
            assert_eq!(write_archive(&a).unwrap(), first);
        }
    }

    #[test]
    fn single_mtime_difference_changes_output() {
        let a = sample();
        let mut b = a.clone();
        b.entries[2].mtime += 1;
        assert_ne!(write_archive(&a).unwrap(), write_archive(&b).unwrap());
    }

    #[test]
    fn entry_count_overflow_needs_zip64() {
        let mut a = Archive::new(FormatKind::Zip);
        for i in 0..65_537u32 {
            a.entries.push(Entry::file(format!("f{i:05}").as_bytes(), Vec::new()));
        }
        let err = write(&a, &ZipWriteOptions { allow_zip64: false }).unwrap_err();
        assert!(matches!(err, ArchiveError::EntryTooLarge(_)));
        let bytes = write(&a, &ZipWriteOptions::default()).unwrap();
        let p = parse_archive(&bytes).unwrap();
        assert_eq!(p.archive.entries.len(), 65_537);
    }

    #[test]
    fn non_unix_host_yields_mode_zero() {
        let a = sample();
        let mut bytes = write_archive(&a).unwrap();
        // Overwrite every central-directory version-made-by host byte with
        // 0 (DOS); external attributes stay, but the mode must read as 0.
        let mut pos = 0;
        while let Some(at) = bytes[pos..].windows(4).position(|w| w == CENTRAL_SIG.to_le_bytes()) {
            bytes[pos + at + 5] = 0;
            pos += at + 4;
        }
        let parsed = parse_archive(&bytes).unwrap();
        assert!(parsed.archive.entries.iter().all(|e| e.unix_mode == 0));
    }

    #[test]
    fn encrypted_entries_are_rejected() {
        let a = sample();
        let mut bytes = write_archive(&a).unwrap();
        // Set the encryption bit in the first central-directory flags word.
        let cd = bytes.windows(4).position(|w| w == CENTRAL_SIG.to_le_bytes()).unwrap();
        bytes[cd + 8] |= 0x01;
        assert!(matches!(parse_archive(&bytes), Err(ArchiveError::Malformed(_))));
    }

    #[test]
    fn crc_corruption_is_detected() {
        let a = sample();
        let mut bytes = write_archive(&a).unwrap();
        // Flip a payload byte of data.bin without touching the headers.
        let pos = bytes.windows(4).rposition(|w| w == [0xAB, 0xAB, 0xAB, 0xAB]).unwrap();
        bytes[pos] ^= 0xFF;
        assert!(matches!(parse_archive(&bytes), Err(ArchiveError::Malformed(m)) if m.contains("CRC")));
    }
}
