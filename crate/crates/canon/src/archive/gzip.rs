//! RFC 1952 gzip member reading and deterministic writing.
//!
//! A gzip archive models exactly one entry: the decompressed payload, with
//! the FNAME header field as its path and the header MTIME as its mtime.
//! FEXTRA subfields map onto entry extra fields; the OS byte and optional
//! FCOMMENT live in the trailer.

use super::{deflate_compress, Archive, ArchiveError, Compression, Entry, FormatKind, Parsed, Trailer};
use std::io::Read;

const FLG_FHCRC: u8 = 1 << 1;
const FLG_FEXTRA: u8 = 1 << 2;
const FLG_FNAME: u8 = 1 << 3;
const FLG_FCOMMENT: u8 = 1 << 4;

pub(super) fn parse(bytes: &[u8]) -> Result<Parsed, ArchiveError> {
    if bytes.len() < 18 {
        return Err(ArchiveError::Malformed("gzip member too short".into()));
    }
    if bytes[2] != 8 {
        return Err(ArchiveError::Malformed(format!("unsupported gzip compression method {}", bytes[2])));
    }
    let flg = bytes[3];
    if flg & 0xE0 != 0 {
        return Err(ArchiveError::Malformed("reserved gzip flag bits set".into()));
    }
    let mtime = u32::from_le_bytes(bytes[4..8].try_into().unwrap()) as i64;
    let os = bytes[9];
    let mut pos = 10;

    let mut extra_fields = Vec::new();
    if flg & FLG_FEXTRA != 0 {
        if pos + 2 > bytes.len() {
            return Err(ArchiveError::Malformed("truncated gzip extra field".into()));
        }
        let xlen = u16::from_le_bytes(bytes[pos..pos + 2].try_into().unwrap()) as usize;
        pos += 2;
        if pos + xlen > bytes.len() {
            return Err(ArchiveError::Malformed("truncated gzip extra field".into()));
        }
        let extra = &bytes[pos..pos + xlen];
        pos += xlen;
        let mut i = 0;
        while i + 4 <= extra.len() {
            let tag = u16::from_le_bytes(extra[i..i + 2].try_into().unwrap());
            let len = u16::from_le_bytes(extra[i + 2..i + 4].try_into().unwrap()) as usize;
            if i + 4 + len > extra.len() {
                return Err(ArchiveError::Malformed("bad gzip extra subfield".into()));
            }
            extra_fields.push((tag, extra[i + 4..i + 4 + len].to_vec()));
            i += 4 + len;
        }
    }

    let read_zstr = |pos: &mut usize| -> Result<Vec<u8>, ArchiveError> {
        let start = *pos;
        while *pos < bytes.len() && bytes[*pos] != 0 {
            *pos += 1;
        }
        if *pos >= bytes.len() {
            return Err(ArchiveError::Malformed("unterminated gzip header string".into()));
        }
        let s = bytes[start..*pos].to_vec();
        *pos += 1;
        Ok(s)
    };

    let fname = if flg & FLG_FNAME != 0 { read_zstr(&mut pos)? } else { Vec::new() };
    let comment = if flg & FLG_FCOMMENT != 0 { Some(read_zstr(&mut pos)?) } else { None };
    if flg & FLG_FHCRC != 0 {
        if pos + 2 > bytes.len() {
            return Err(ArchiveError::Malformed("truncated gzip header CRC".into()));
        }
        pos += 2;
    }

    if bytes.len() < pos + 8 {
        return Err(ArchiveError::Malformed("gzip member missing trailer".into()));
    }
    let body = &bytes[pos..];
    let mut decoder = flate2::read::DeflateDecoder::new(body);
    let mut payload = Vec::new();
    decoder
        .read_to_end(&mut payload)
        .map_err(|e| ArchiveError::Malformed(format!("bad deflate stream: {e}")))?;
    let consumed = decoder.total_in() as usize;
    let rest = &body[consumed..];
    if rest.len() != 8 {
        return Err(ArchiveError::Malformed("bytes after gzip member".into()));
    }
    let crc = u32::from_le_bytes(rest[0..4].try_into().unwrap());
    let isize_ = u32::from_le_bytes(rest[4..8].try_into().unwrap());
    if crc32fast::hash(&payload) != crc {
        return Err(ArchiveError::Malformed("gzip CRC mismatch".into()));
    }
    if payload.len() as u32 != isize_ {
        return Err(ArchiveError::Malformed("gzip ISIZE mismatch".into()));
    }

    let mut path = fname;
    for b in path.iter_mut() {
        if *b == b'\\' {
            *b = b'/';
        }
    }
    let entry = Entry {
        path,
        payload,
        mtime,
        unix_mode: 0,
        owner_user: Vec::new(),
        owner_group: Vec::new(),
        compression: Compression::Deflate,
        extra_fields,
        is_directory: false,
    };
    let archive = Archive { format: FormatKind::Gzip, entries: vec![entry], trailer: Trailer::GzipHeader { os, comment } };
    Ok(Parsed { archive, notes: Vec::new() })
}

pub(super) fn write(archive: &Archive) -> Result<Vec<u8>, ArchiveError> {
    if archive.entries.len() != 1 {
        return Err(ArchiveError::Malformed("gzip archives hold exactly one entry".into()));
    }
    let entry = &archive.entries[0];
    let (os, comment) = match &archive.trailer {
        Trailer::GzipHeader { os, comment } => (*os, comment.clone()),
        _ => (0, None),
    };

    let mut flg = 0u8;
    if !entry.extra_fields.is_empty() {
        flg |= FLG_FEXTRA;
    }
    if !entry.path.is_empty() {
        flg |= FLG_FNAME;
    }
    if comment.is_some() {
        flg |= FLG_FCOMMENT;
    }

    let mut out = vec![0x1F, 0x8B, 8, flg];
    out.extend_from_slice(&(entry.mtime.clamp(0, u32::MAX as i64) as u32).to_le_bytes());
    out.push(0); // XFL: fixed effort, neither fastest nor maximum
    out.push(os);
    if flg & FLG_FEXTRA != 0 {
        let mut extra = Vec::new();
        for (tag, body) in &entry.extra_fields {
            extra.extend_from_slice(&tag.to_le_bytes());
            extra.extend_from_slice(&(body.len() as u16).to_le_bytes());
            extra.extend_from_slice(body);
        }
        out.extend_from_slice(&(extra.len() as u16).to_le_bytes());
        out.extend_from_slice(&extra);
    }
    if flg & FLG_FNAME != 0 {
        out.extend_from_slice(&entry.path);
        out.push(0);
    }
    if let Some(c) = &comment {
        out.extend_from_slice(c);
        out.push(0);
    }
    out.extend_from_slice(&deflate_compress(&entry.payload));
    out.extend_from_slice(&crc32fast::hash(&entry.payload).to_le_bytes());
    out.extend_from_slice(&(entry.payload.len() as u32).to_le_bytes());
    Ok(out)
}
