//! Shared test support: an independent classfile oracle (a self-contained
//! byte-level reader sharing no code with the crate under test), a
//! deterministic random-archive generator, and a minimal static HTTP server
//! for fetcher tests.

#![allow(dead_code)]

pub mod gen;
pub mod http;

use std::collections::BTreeMap;

#[derive(Debug)]
pub struct Dis {
    pub this_class: String,
    pub super_class: String,
    pub members: Vec<DisMember>,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct DisMember {
    pub kind: &'static str,
    pub access_flags: u16,
    pub name: String,
    pub descriptor: String,
    /// Instruction stream with pool operands replaced by resolved symbols,
    /// so two pools laying out the same code compare equal.
    pub instructions: String,
}

impl Dis {
    /// Multiset of (kind, flags, name, descriptor, relocated instructions).
    pub fn member_summary(&self) -> BTreeMap<DisMember, usize> {
        let mut out = BTreeMap::new();
        for m in &self.members {
            *out.entry(m.clone()).or_insert(0) += 1;
        }
        out
    }
}

#[derive(Clone, Debug)]
enum PoolEntry {
    Utf8(String),
    Int(i32),
    Float(u32),
    Long(i64),
    Double(u64),
    Class(u16),
    Str(u16),
    Ref(&'static str, u16, u16),
    NameAndType(u16, u16),
    Handle(u8, u16),
    MethodType(u16),
    Dyn(&'static str, u16, u16),
    Module(u16),
    Package(u16),
    Empty,
}

struct R<'a> {
    d: &'a [u8],
    p: usize,
}

impl<'a> R<'a> {
    fn u8(&mut self) -> Result<u8, String> {
        let v = *self.d.get(self.p).ok_or("eof")?;
        self.p += 1;
        Ok(v)
    }

    fn u16(&mut self) -> Result<u16, String> {
        Ok(((self.u8()? as u16) << 8) | self.u8()? as u16)
    }

    fn u32(&mut self) -> Result<u32, String> {
        Ok(((self.u16()? as u32) << 16) | self.u16()? as u32)
    }

    fn bytes(&mut self, n: usize) -> Result<&'a [u8], String> {
        if self.p + n > self.d.len() {
            return Err("eof".into());
        }
        let s = &self.d[self.p..self.p + n];
        self.p += n;
        Ok(s)
    }
}

fn read_pool(r: &mut R<'_>) -> Result<Vec<PoolEntry>, String> {
    let count = r.u16()? as usize;
    let mut pool = vec![PoolEntry::Empty; count];
    let mut i = 1;
    while i < count {
        let tag = r.u8()?;
        let (entry, wide) = match tag {
            1 => {
                let len = r.u16()? as usize;
                (PoolEntry::Utf8(String::from_utf8_lossy(r.bytes(len)?).into_owned()), false)
            }
            3 => (PoolEntry::Int(r.u32()? as i32), false),
            4 => (PoolEntry::Float(r.u32()?), false),
            5 => (PoolEntry::Long(((r.u32()? as u64) << 32 | r.u32()? as u64) as i64), true),
            6 => (PoolEntry::Double((r.u32()? as u64) << 32 | r.u32()? as u64), true),
            7 => (PoolEntry::Class(r.u16()?), false),
            8 => (PoolEntry::Str(r.u16()?), false),
            9 => (PoolEntry::Ref("Field", r.u16()?, r.u16()?), false),
            10 => (PoolEntry::Ref("Method", r.u16()?, r.u16()?), false),
            11 => (PoolEntry::Ref("InterfaceMethod", r.u16()?, r.u16()?), false),
            12 => (PoolEntry::NameAndType(r.u16()?, r.u16()?), false),
            15 => (PoolEntry::Handle(r.u8()?, r.u16()?), false),
            16 => (PoolEntry::MethodType(r.u16()?), false),
            17 => (PoolEntry::Dyn("Dynamic", r.u16()?, r.u16()?), false),
            18 => (PoolEntry::Dyn("InvokeDynamic", r.u16()?, r.u16()?), false),
            19 => (PoolEntry::Module(r.u16()?), false),
            20 => (PoolEntry::Package(r.u16()?), false),
            t => return Err(format!("bad tag {t}")),
        };
        pool[i] = entry;
        i += if wide { 2 } else { 1 };
    }
    Ok(pool)
}

fn sym(pool: &[PoolEntry], idx: u16) -> Result<String, String> {
    let entry = pool.get(idx as usize).ok_or_else(|| format!("pool index {idx} out of range"))?;
    Ok(match entry {
        PoolEntry::Utf8(s) => format!("utf8:{s}"),
        PoolEntry::Int(v) => format!("int:{v}"),
        PoolEntry::Float(v) => format!("float:{v:08x}"),
        PoolEntry::Long(v) => format!("long:{v}"),
        PoolEntry::Double(v) => format!("double:{v:016x}"),
        PoolEntry::Class(n) => format!("class:{}", sym(pool, *n)?),
        PoolEntry::Str(n) => format!("string:{}", sym(pool, *n)?),
        PoolEntry::Ref(kind, c, nt) => format!("{kind}:{}:{}", sym(pool, *c)?, sym(pool, *nt)?),
        PoolEntry::NameAndType(n, d) => format!("nat:{}:{}", sym(pool, *n)?, sym(pool, *d)?),
        PoolEntry::Handle(kind, target) => format!("handle:{kind}:{}", sym(pool, *target)?),
        PoolEntry::MethodType(d) => format!("mtype:{}", sym(pool, *d)?),
        PoolEntry::Dyn(kind, bootstrap, nt) => format!("{kind}:{bootstrap}:{}", sym(pool, *nt)?),
        PoolEntry::Module(n) => format!("module:{}", sym(pool, *n)?),
        PoolEntry::Package(n) => format!("package:{}", sym(pool, *n)?),
        PoolEntry::Empty => return Err(format!("reference to empty pool slot {idx}")),
    })
}

fn utf8(pool: &[PoolEntry], idx: u16) -> Result<String, String> {
    match pool.get(idx as usize) {
        Some(PoolEntry::Utf8(s)) => Ok(s.clone()),
        other => Err(format!("expected utf8 at {idx}, found {other:?}")),
    }
}

fn class_name(pool: &[PoolEntry], idx: u16) -> Result<String, String> {
    match pool.get(idx as usize) {
        Some(PoolEntry::Class(n)) => utf8(pool, *n),
        other => Err(format!("expected class at {idx}, found {other:?}")),
    }
}

/// Render code with pool operands replaced by their symbolic form.
fn relocate_code(code: &[u8], pool: &[PoolEntry]) -> Result<String, String> {
    let mut out = String::new();
    let mut pc = 0usize;
    while pc < code.len() {
        let op = code[pc];
        let get_u16 = |at: usize| -> Result<u16, String> {
            if at + 2 > code.len() {
                return Err("truncated operand".into());
            }
            Ok(((code[at] as u16) << 8) | code[at + 1] as u16)
        };
        let mut push_plain = |len: usize| -> Result<usize, String> {
            if pc + len > code.len() {
                return Err("truncated instruction".into());
            }
            out.push_str(&format!("{:02x}", op));
            for b in &code[pc + 1..pc + len] {
                out.push_str(&format!("{b:02x}"));
            }
            out.push(' ');
            Ok(len)
        };
        let len = match op {
            0x12 => {
                let idx = *code.get(pc + 1).ok_or("truncated ldc")? as u16;
                out.push_str(&format!("12{{{}}} ", sym(pool, idx)?));
                2
            }
            0x13 | 0x14 | 0xB2..=0xB8 | 0xBB | 0xBD | 0xC0 | 0xC1 => {
                let idx = get_u16(pc + 1)?;
                out.push_str(&format!("{op:02x}{{{}}} ", sym(pool, idx)?));
                3
            }
            0xB9 | 0xBA => {
                let idx = get_u16(pc + 1)?;
                let tail = get_u16(pc + 3)?;
                out.push_str(&format!("{op:02x}{{{}}}{tail:04x} ", sym(pool, idx)?));
                5
            }
            0xC5 => {
                let idx = get_u16(pc + 1)?;
                let dims = *code.get(pc + 3).ok_or("truncated multianewarray")?;
                out.push_str(&format!("c5{{{}}}{dims:02x} ", sym(pool, idx)?));
                4
            }
            0x00..=0x0F | 0x1A..=0x35 | 0x3B..=0x83 | 0x85..=0x98 | 0xAC..=0xB1 | 0xBE | 0xBF | 0xC2 | 0xC3 => push_plain(1)?,
            0x10 | 0x15..=0x19 | 0x36..=0x3A | 0xA9 | 0xBC => push_plain(2)?,
            0x11 | 0x84 | 0x99..=0xA8 | 0xC6 | 0xC7 => push_plain(3)?,
            0xC8 | 0xC9 => push_plain(5)?,
            0xC4 => {
                let sub = *code.get(pc + 1).ok_or("truncated wide")?;
                push_plain(if sub == 0x84 { 6 } else { 4 })?
            }
            0xAA | 0xAB => {
                let pad = (4 - ((pc + 1) % 4)) % 4;
                let base = pc + 1 + pad;
                let word = |at: usize| -> Result<i32, String> {
                    if at + 4 > code.len() {
                        return Err("truncated switch".into());
                    }
                    Ok(i32::from_be_bytes(code[at..at + 4].try_into().unwrap()))
                };
                let total = if op == 0xAA {
                    let low = word(base + 4)?;
                    let high = word(base + 8)?;
                    if high < low {
                        return Err("tableswitch high < low".into());
                    }
                    1 + pad + 12 + (high - low + 1) as usize * 4
                } else {
                    let npairs = word(base + 4)?;
                    if npairs < 0 {
                        return Err("negative npairs".into());
                    }
                    1 + pad + 8 + npairs as usize * 8
                };
                if pc + total > code.len() {
                    return Err("truncated switch body".into());
                }
                out.push_str(&format!("{op:02x}"));
                for b in &code[pc + 1..pc + total] {
                    out.push_str(&format!("{b:02x}"));
                }
                out.push(' ');
                total
            }
            other => return Err(format!("unknown opcode {other:02x}")),
        };
        pc += len;
    }
    Ok(out)
}

/// Disassemble classfile bytes into a pool-independent summary.
pub fn disassemble(bytes: &[u8]) -> Result<Dis, String> {
    let mut r = R { d: bytes, p: 0 };
    if r.u32()? != 0xCAFE_BABE {
        return Err("bad magic".into());
    }
    let _minor = r.u16()?;
    let _major = r.u16()?;
    let pool = read_pool(&mut r)?;
    let _access = r.u16()?;
    let this_class = class_name(&pool, r.u16()?)?;
    let super_idx = r.u16()?;
    let super_class = if super_idx == 0 { String::new() } else { class_name(&pool, super_idx)? };
    let interface_count = r.u16()?;
    for _ in 0..interface_count {
        class_name(&pool, r.u16()?)?;
    }

    let mut members = Vec::new();
    for kind in ["field", "method"] {
        let count = r.u16()?;
        for _ in 0..count {
            let access_flags = r.u16()?;
            let name = utf8(&pool, r.u16()?)?;
            let descriptor = utf8(&pool, r.u16()?)?;
            let mut instructions = String::new();
            let attr_count = r.u16()?;
            for _ in 0..attr_count {
                let attr_name = utf8(&pool, r.u16()?)?;
                let len = r.u32()? as usize;
                let data = r.bytes(len)?;
                if attr_name == "Code" {
                    if data.len() < 8 {
                        return Err("short Code attribute".into());
                    }
                    let code_len = u32::from_be_bytes(data[4..8].try_into().unwrap()) as usize;
                    if 8 + code_len > data.len() {
                        return Err("Code length beyond attribute".into());
                    }
                    instructions = relocate_code(&data[8..8 + code_len], &pool)?;
                }
            }
            members.push(DisMember {
                kind: if kind == "field" { "field" } else { "method" },
                access_flags,
                name,
                descriptor,
                instructions,
            });
        }
    }
    Ok(Dis { this_class, super_class, members })
}

/// Structural verification: every pool reference in the class skeleton and
/// attribute framing must be in range and typed correctly, and all lengths
/// must consume the byte stream exactly.
pub fn verify_classfile_bytes(bytes: &[u8]) -> Result<(), String> {
    let dis = disassemble(bytes)?;
    if dis.this_class.is_empty() {
        return Err("empty class name".into());
    }
    // Re-walk the tail to ensure class attributes frame correctly and the
    // stream ends exactly at the end.
    let mut r = R { d: bytes, p: 0 };
    let _ = r.u32()?;
    let _ = r.u32()?;
    let pool = read_pool(&mut r)?;
    let _ = r.u16()?;
    let _ = r.u16()?;
    let _ = r.u16()?;
    let n = r.u16()?;
    for _ in 0..n {
        let _ = r.u16()?;
    }
    for _ in 0..2 {
        let count = r.u16()?;
        for _ in 0..count {
            let _ = r.u16()?;
            utf8(&pool, r.u16()?)?;
            utf8(&pool, r.u16()?)?;
            let attr_count = r.u16()?;
            for _ in 0..attr_count {
                utf8(&pool, r.u16()?)?;
                let len = r.u32()? as usize;
                r.bytes(len)?;
            }
        }
    }
    let attr_count = r.u16()?;
    for _ in 0..attr_count {
        utf8(&pool, r.u16()?)?;
        let len = r.u32()? as usize;
        r.bytes(len)?;
    }
    if r.p != bytes.len() {
        return Err(format!("{} trailing bytes", bytes.len() - r.p));
    }
    Ok(())
}
