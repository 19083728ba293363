//! POSIX ustar reading and deterministic writing.
//!
//! Pax extended headers are parsed and folded into entry fields; GNU
//! long-name records are accepted on read but never produced — oversized
//! values go out as pax records instead. Numeric uid/gid are not modeled
//! and serialize as zero.

use super::{Archive, ArchiveError, Compression, Entry, FormatKind, Parsed, Trailer};

const BLOCK: usize = 512;

fn octal_field(raw: &[u8]) -> Result<i64, ArchiveError> {
    // GNU base-256 extension: high bit set on the first byte.
    if !raw.is_empty() && raw[0] & 0x80 != 0 {
        let mut v: i64 = (raw[0] & 0x7F) as i64;
        for &b in &raw[1..] {
            v = (v << 8) | b as i64;
        }
        return Ok(v);
    }
    let s: Vec<u8> = raw.iter().copied().filter(|b| !matches!(b, b' ' | 0)).collect();
    if s.is_empty() {
        return Ok(0);
    }
    let text = std::str::from_utf8(&s).map_err(|_| ArchiveError::Malformed("non-octal header field".into()))?;
    i64::from_str_radix(text, 8).map_err(|_| ArchiveError::Malformed("non-octal header field".into()))
}

fn trimmed(raw: &[u8]) -> Vec<u8> {
    let end = raw.iter().position(|&b| b == 0).unwrap_or(raw.len());
    raw[..end].to_vec()
}

fn header_checksum(block: &[u8]) -> u32 {
    let mut sum: u32 = 0;
    for (i, &b) in block.iter().enumerate() {
        sum += if (148..156).contains(&i) { b' ' as u32 } else { b as u32 };
    }
    sum
}

#[derive(Default)]
struct PaxOverrides {
    path: Option<Vec<u8>>,
    linkpath: Option<Vec<u8>>,
    mtime: Option<i64>,
    uname: Option<Vec<u8>>,
    gname: Option<Vec<u8>>,
    size: Option<i64>,
}

fn parse_pax_records(data: &[u8], out: &mut PaxOverrides) -> Result<(), ArchiveError> {
    let mut pos = 0;
    while pos < data.len() {
        let space = data[pos..]
            .iter()
            .position(|&b| b == b' ')
            .ok_or_else(|| ArchiveError::Malformed("bad pax record length".into()))?;
        let len: usize = std::str::from_utf8(&data[pos..pos + space])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| ArchiveError::Malformed("bad pax record length".into()))?;
        if len == 0 || pos + len > data.len() {
            return Err(ArchiveError::Malformed("bad pax record length".into()));
        }
        let record = &data[pos + space + 1..pos + len - 1]; // strip trailing \n
        if let Some(eq) = record.iter().position(|&b| b == b'=') {
            let (key, value) = (&record[..eq], &record[eq + 1..]);
            match key {
                b"path" => out.path = Some(value.to_vec()),
                b"linkpath" => out.linkpath = Some(value.to_vec()),
                b"uname" => out.uname = Some(value.to_vec()),
                b"gname" => out.gname = Some(value.to_vec()),
                b"mtime" => {
                    let text = std::str::from_utf8(value).map_err(|_| ArchiveError::Malformed("bad pax mtime".into()))?;
                    let whole = text.split('.').next().unwrap_or("0");
                    out.mtime = Some(whole.parse().map_err(|_| ArchiveError::Malformed("bad pax mtime".into()))?);
                }
                b"size" => {
                    let text = std::str::from_utf8(value).map_err(|_| ArchiveError::Malformed("bad pax size".into()))?;
                    out.size = Some(text.parse().map_err(|_| ArchiveError::Malformed("bad pax size".into()))?);
                }
                _ => {}
            }
        }
        pos += len;
    }
    Ok(())
}

const S_IFREG: u16 = 0o100000;
const S_IFDIR: u16 = 0o040000;
const S_IFLNK: u16 = 0o120000;

pub(super) fn parse(bytes: &[u8]) -> Result<Parsed, ArchiveError> {
    let mut entries = Vec::new();
    let notes = Vec::new();
    let mut pos = 0;
    let mut pending = PaxOverrides::default();
    let mut gnu_longname: Option<Vec<u8>> = None;

    loop {
        if pos + BLOCK > bytes.len() {
            // Accept EOF without the closing zero blocks; some producers omit them.
            break;
        }
        let block = &bytes[pos..pos + BLOCK];
        if block.iter().all(|&b| b == 0) {
            break;
        }
        let magic = &block[257..262];
        if magic != b"ustar" {
            return Err(ArchiveError::Malformed("bad ustar magic".into()));
        }
        let recorded_sum = octal_field(&block[148..156])? as u32;
        if header_checksum(block) != recorded_sum {
            return Err(ArchiveError::Malformed("header checksum mismatch".into()));
        }

        let typeflag = block[156];
        let header_size = octal_field(&block[124..136])?;
        // A preceding pax record overrides the size of the entry it
        // annotates, but never of metadata blocks themselves.
        let size = match typeflag {
            b'x' | b'g' | b'L' | b'K' => header_size,
            _ => pending.size.take().unwrap_or(header_size),
        };
        if size < 0 || size as u64 > bytes.len() as u64 {
            return Err(ArchiveError::Malformed("entry size out of range".into()));
        }
        let size = size as usize;
        let data_start = pos + BLOCK;
        let data_end = data_start
            .checked_add(size)
            .filter(|&e| e <= bytes.len())
            .ok_or_else(|| ArchiveError::Malformed("truncated entry data".into()))?;
        let data = &bytes[data_start..data_end];
        pos = data_start + size.div_ceil(512) * 512;

        match typeflag {
            b'x' | b'g' => {
                parse_pax_records(data, &mut pending)?;
                continue;
            }
            b'L' => {
                gnu_longname = Some(trimmed(data));
                continue;
            }
            b'K' => {
                pending.linkpath = Some(trimmed(data));
                continue;
            }
            b'0' | 0 | b'5' | b'2' => {}
            other => {
                return Err(ArchiveError::Malformed(format!("unsupported tar entry type {:?}", other as char)));
            }
        }

        let mut path = match (pending.path.take(), gnu_longname.take()) {
            (Some(p), _) => p,
            (None, Some(p)) => p,
            (None, None) => {
                let name = trimmed(&block[0..100]);
                let prefix = trimmed(&block[345..500]);
                if prefix.is_empty() {
                    name
                } else {
                    let mut p = prefix;
                    p.push(b'/');
                    p.extend_from_slice(&name);
                    p
                }
            }
        };
        for b in path.iter_mut() {
            if *b == b'\\' {
                *b = b'/';
            }
        }

        let perm = (octal_field(&block[100..108])? as u16) & 0o7777;
        let mtime = pending.mtime.take().unwrap_or(octal_field(&block[136..148])?);
        let owner_user = pending.uname.take().unwrap_or_else(|| trimmed(&block[265..297]));
        let owner_group = pending.gname.take().unwrap_or_else(|| trimmed(&block[297..329]));

        let (is_directory, type_bits, payload) = match typeflag {
            b'5' => {
                if !path.ends_with(b"/") {
                    path.push(b'/');
                }
                (true, S_IFDIR, Vec::new())
            }
            b'2' => {
                // The payload of a symlink models its target.
                let target = pending.linkpath.take().unwrap_or_else(|| trimmed(&block[157..257]));
                (false, S_IFLNK, target)
            }
            _ => (false, S_IFREG, data.to_vec()),
        };
        pending = PaxOverrides::default();

        entries.push(Entry {
            path,
            payload,
            mtime,
            unix_mode: type_bits | perm,
            owner_user,
            owner_group,
            compression: Compression::Store,
            extra_fields: Vec::new(),
            is_directory,
        });
    }

    Ok(Parsed { archive: Archive { format: FormatKind::Tar, entries, trailer: Trailer::None }, notes })
}

fn write_octal(field: &mut [u8], value: i64) {
    let s = format!("{:0width$o}", value, width = field.len() - 1);
    field[..s.len()].copy_from_slice(s.as_bytes());
    field[field.len() - 1] = 0;
}

fn pax_record(key: &str, value: &[u8]) -> Vec<u8> {
    // Record length counts its own decimal digits.
    let payload_len = 1 + key.len() + 1 + value.len() + 1; // space key = value \n
    let mut total = payload_len + 1;
    while total.to_string().len() + payload_len != total {
        total = total.to_string().len() + payload_len;
    }
    let mut out = format!("{total} {key}=").into_bytes();
    out.extend_from_slice(value);
    out.push(b'\n');
    out
}

struct HeaderFields<'a> {
    name: &'a [u8],
    prefix: &'a [u8],
    mode: u16,
    mtime: i64,
    typeflag: u8,
    linkname: &'a [u8],
    uname: &'a [u8],
    gname: &'a [u8],
    size: usize,
}

fn push_header(out: &mut Vec<u8>, f: &HeaderFields<'_>) {
    let mut block = [0u8; BLOCK];
    block[..f.name.len()].copy_from_slice(f.name);
    write_octal(&mut block[100..108], f.mode as i64);
    write_octal(&mut block[108..116], 0); // uid
    write_octal(&mut block[116..124], 0); // gid
    write_octal(&mut block[124..136], f.size as i64);
    write_octal(&mut block[136..148], f.mtime);
    block[156] = f.typeflag;
    block[157..157 + f.linkname.len()].copy_from_slice(f.linkname);
    block[257..263].copy_from_slice(b"ustar\0");
    block[263..265].copy_from_slice(b"00");
    block[265..265 + f.uname.len()].copy_from_slice(f.uname);
    block[297..297 + f.gname.len()].copy_from_slice(f.gname);
    block[345..345 + f.prefix.len()].copy_from_slice(f.prefix);
    let sum = header_checksum(&block);
    let sum_text = format!("{sum:06o}\0 ");
    block[148..156].copy_from_slice(sum_text.as_bytes());
    out.extend_from_slice(&block);
}

/// Split a path into (prefix, name) per ustar rules, if possible.
fn split_ustar_name(path: &[u8]) -> Option<(&[u8], &[u8])> {
    if path.len() <= 100 {
        return Some((&[], path));
    }
    // Find a slash so that name <= 100 and prefix <= 155.
    for (i, &b) in path.iter().enumerate().rev() {
        if b == b'/' && path.len() - i - 1 <= 100 && i <= 155 {
            return Some((&path[..i], &path[i + 1..]));
        }
    }
    None
}

pub(super) fn write(archive: &Archive) -> Result<Vec<u8>, ArchiveError> {
    let mut out = Vec::new();
    for entry in &archive.entries {
        let type_bits = entry.unix_mode & 0o170000;
        let typeflag = if entry.is_directory || type_bits == S_IFDIR {
            b'5'
        } else if type_bits == S_IFLNK {
            b'2'
        } else {
            b'0'
        };
        let is_link = typeflag == b'2';
        let body: &[u8] = if entry.is_directory || is_link { &[] } else { &entry.payload };
        let linkname: &[u8] = if is_link { &entry.payload } else { &[] };

        let mut pax = Vec::new();
        let split = split_ustar_name(&entry.path);
        if split.is_none() {
            pax.extend_from_slice(&pax_record("path", &entry.path));
        }
        if linkname.len() > 100 {
            pax.extend_from_slice(&pax_record("linkpath", linkname));
        }
        if entry.mtime < 0 || entry.mtime > 0o77_777_777_777 {
            pax.extend_from_slice(&pax_record("mtime", entry.mtime.to_string().as_bytes()));
        }
        if entry.owner_user.len() > 31 {
            pax.extend_from_slice(&pax_record("uname", &entry.owner_user));
        }
        if entry.owner_group.len() > 31 {
            pax.extend_from_slice(&pax_record("gname", &entry.owner_group));
        }
        if !pax.is_empty() {
            let mut pax_name = b"PaxHeaders/".to_vec();
            let base = entry.basename();
            pax_name.extend_from_slice(&base[..base.len().min(88)]);
            push_header(
                &mut out,
                &HeaderFields {
                    name: &pax_name,
                    prefix: &[],
                    mode: 0o644,
                    mtime: entry.mtime.clamp(0, 0o77_777_777_777),
                    typeflag: b'x',
                    linkname: &[],
                    uname: &[],
                    gname: &[],
                    size: pax.len(),
                },
            );
            out.extend_from_slice(&pax);
            out.resize(out.len().div_ceil(512) * 512, 0);
        }

        let (prefix, name) = split.unwrap_or((&[], &entry.path[..entry.path.len().min(100)]));
        push_header(
            &mut out,
            &HeaderFields {
                name,
                prefix,
                mode: entry.unix_mode & 0o7777,
                mtime: entry.mtime.clamp(0, 0o77_777_777_777),
                typeflag,
                linkname: &linkname[..linkname.len().min(100)],
                uname: &entry.owner_user[..entry.owner_user.len().min(31)],
                gname: &entry.owner_group[..entry.owner_group.len().min(31)],
                size: body.len(),
            },
        );
        out.extend_from_slice(body);
        out.resize(out.len().div_ceil(512) * 512, 0);
    }
    out.extend_from_slice(&[0u8; 2 * BLOCK]);
    Ok(out)
}
