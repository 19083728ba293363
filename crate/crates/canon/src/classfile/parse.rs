//! Classfile parsing: constant pool resolution, attribute decoding, and
//! bytecode scanning for relocatable pool operands.

use super::*;

struct Reader<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], ClassfileError> {
        if self.pos + n > self.data.len() {
            return Err(ClassfileError::Malformed("truncated".into()));
        }
        let s = &self.data[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn u8(&mut self) -> Result<u8, ClassfileError> {
        Ok(self.take(1)?[0])
    }

    fn u16(&mut self) -> Result<u16, ClassfileError> {
        Ok(u16::from_be_bytes(self.take(2)?.try_into().unwrap()))
    }

    fn u32(&mut self) -> Result<u32, ClassfileError> {
        Ok(u32::from_be_bytes(self.take(4)?.try_into().unwrap()))
    }
}

/// Undecoded pool entry; indices into the raw pool.
#[derive(Clone, Debug)]
enum RawConst {
    Utf8(Vec<u8>),
    Integer(i32),
    Float(u32),
    Long(i64),
    Double(u64),
    Class(u16),
    Str(u16),
    FieldRef(u16, u16),
    MethodRef(u16, u16),
    InterfaceMethodRef(u16, u16),
    NameAndType(u16, u16),
    MethodHandle(u8, u16),
    MethodType(u16),
    Dynamic(u16, u16),
    InvokeDynamic(u16, u16),
    Module(u16),
    Package(u16),
    /// Second slot of a long/double.
    Continuation,
}

pub(super) struct Pool {
    resolved: Vec<Option<Const>>,
}

impl Pool {
    fn build(raw: Vec<Option<RawConst>>) -> Result<Pool, ClassfileError> {
        let mut pool = Pool { resolved: vec![None; raw.len()] };
        for index in 1..raw.len() {
            if matches!(raw[index], Some(RawConst::Continuation) | None) {
                continue;
            }
            pool.resolve(&raw, index as u16, 0)?;
        }
        Ok(pool)
    }

    fn resolve(&mut self, raw: &[Option<RawConst>], index: u16, depth: u8) -> Result<Const, ClassfileError> {
        if depth > 8 {
            return Err(ClassfileError::Malformed("constant pool reference cycle".into()));
        }
        let i = index as usize;
        if i == 0 || i >= raw.len() {
            return Err(ClassfileError::Malformed(format!("pool index {index} out of range")));
        }
        if let Some(c) = &self.resolved[i] {
            return Ok(c.clone());
        }
        let entry = raw[i]
            .as_ref()
            .ok_or_else(|| ClassfileError::Malformed(format!("pool index {index} is a long/double continuation")))?;
        let utf8_at = |raw: &[Option<RawConst>], idx: u16| -> Result<MUtf8, ClassfileError> {
            match raw.get(idx as usize).and_then(|e| e.as_ref()) {
                Some(RawConst::Utf8(bytes)) => Ok(bytes.clone()),
                _ => Err(ClassfileError::Malformed(format!("pool index {idx} is not Utf8"))),
            }
        };
        let resolved = match entry {
            RawConst::Utf8(bytes) => Const::Utf8(bytes.clone()),
            RawConst::Integer(v) => Const::Integer(*v),
            RawConst::Float(v) => Const::Float(*v),
            RawConst::Long(v) => Const::Long(*v),
            RawConst::Double(v) => Const::Double(*v),
            RawConst::Class(n) => Const::Class(utf8_at(raw, *n)?),
            RawConst::Str(n) => Const::Str(utf8_at(raw, *n)?),
            RawConst::NameAndType(n, d) => Const::NameAndType { name: utf8_at(raw, *n)?, descriptor: utf8_at(raw, *d)? },
            RawConst::FieldRef(c, nt) | RawConst::MethodRef(c, nt) | RawConst::InterfaceMethodRef(c, nt) => {
                let class = match self.resolve(raw, *c, depth + 1)? {
                    Const::Class(name) => name,
                    _ => return Err(ClassfileError::Malformed("member ref without class".into())),
                };
                let (name, descriptor) = match self.resolve(raw, *nt, depth + 1)? {
                    Const::NameAndType { name, descriptor } => (name, descriptor),
                    _ => return Err(ClassfileError::Malformed("member ref without name-and-type".into())),
                };
                match entry {
                    RawConst::FieldRef(..) => Const::FieldRef { class, name, descriptor },
                    RawConst::MethodRef(..) => Const::MethodRef { class, name, descriptor },
                    _ => Const::InterfaceMethodRef { class, name, descriptor },
                }
            }
            RawConst::MethodHandle(kind, target) => {
                let reference = self.resolve(raw, *target, depth + 1)?;
                match reference {
                    Const::FieldRef { .. } | Const::MethodRef { .. } | Const::InterfaceMethodRef { .. } => {
                        Const::MethodHandle { kind: *kind, reference: Box::new(reference) }
                    }
                    _ => return Err(ClassfileError::Malformed("method handle target is not a member ref".into())),
                }
            }
            RawConst::MethodType(d) => Const::MethodType(utf8_at(raw, *d)?),
            RawConst::Dynamic(b, nt) => {
                let (name, descriptor) = match self.resolve(raw, *nt, depth + 1)? {
                    Const::NameAndType { name, descriptor } => (name, descriptor),
                    _ => return Err(ClassfileError::Malformed("dynamic constant without name-and-type".into())),
                };
                Const::Dynamic { bootstrap: *b, name, descriptor }
            }
            RawConst::InvokeDynamic(b, nt) => {
                let (name, descriptor) = match self.resolve(raw, *nt, depth + 1)? {
                    Const::NameAndType { name, descriptor } => (name, descriptor),
                    _ => return Err(ClassfileError::Malformed("invokedynamic without name-and-type".into())),
                };
                Const::InvokeDynamic { bootstrap: *b, name, descriptor }
            }
            RawConst::Module(n) => Const::Module(utf8_at(raw, *n)?),
            RawConst::Package(n) => Const::Package(utf8_at(raw, *n)?),
            RawConst::Continuation => {
                return Err(ClassfileError::Malformed("reference into long/double continuation slot".into()))
            }
        };
        self.resolved[i] = Some(resolved.clone());
        Ok(resolved)
    }

    pub(super) fn get(&self, index: u16) -> Result<Const, ClassfileError> {
        self.resolved
            .get(index as usize)
            .and_then(|c| c.clone())
            .ok_or_else(|| ClassfileError::Malformed(format!("bad pool index {index}")))
    }

    pub(super) fn utf8(&self, index: u16) -> Result<MUtf8, ClassfileError> {
        match self.get(index)? {
            Const::Utf8(bytes) => Ok(bytes),
            other => Err(ClassfileError::Malformed(format!("expected Utf8 at {index}, found {other:?}"))),
        }
    }

    pub(super) fn class_name(&self, index: u16) -> Result<MUtf8, ClassfileError> {
        match self.get(index)? {
            Const::Class(name) => Ok(name),
            other => Err(ClassfileError::Malformed(format!("expected Class at {index}, found {other:?}"))),
        }
    }
}

/// Parse a classfile, resolving all pool references to symbolic form.
/// Unknown attributes are preserved as opaque payloads.
pub fn parse_classfile(bytes: &[u8]) -> Result<ClassFile, ClassfileError> {
    let mut r = Reader { data: bytes, pos: 0 };
    if r.u32()? != 0xCAFE_BABE {
        return Err(ClassfileError::Malformed("bad magic".into()));
    }
    let minor_version = r.u16()?;
    let major_version = r.u16()?;

    let pool_count = r.u16()?;
    let mut raw: Vec<Option<RawConst>> = vec![None; pool_count as usize];
    let mut i = 1u16;
    while i < pool_count {
        let tag = r.u8()?;
        let entry = match tag {
            1 => {
                let len = r.u16()? as usize;
                RawConst::Utf8(r.take(len)?.to_vec())
            }
            3 => RawConst::Integer(r.u32()? as i32),
            4 => RawConst::Float(r.u32()?),
            5 => RawConst::Long(((r.u32()? as u64) << 32 | r.u32()? as u64) as i64),
            6 => RawConst::Double((r.u32()? as u64) << 32 | r.u32()? as u64),
            7 => RawConst::Class(r.u16()?),
            8 => RawConst::Str(r.u16()?),
            9 => RawConst::FieldRef(r.u16()?, r.u16()?),
            10 => RawConst::MethodRef(r.u16()?, r.u16()?),
            11 => RawConst::InterfaceMethodRef(r.u16()?, r.u16()?),
            12 => RawConst::NameAndType(r.u16()?, r.u16()?),
            15 => RawConst::MethodHandle(r.u8()?, r.u16()?),
            16 => RawConst::MethodType(r.u16()?),
            17 => RawConst::Dynamic(r.u16()?, r.u16()?),
            18 => RawConst::InvokeDynamic(r.u16()?, r.u16()?),
            19 => RawConst::Module(r.u16()?),
            20 => RawConst::Package(r.u16()?),
            other => return Err(ClassfileError::Malformed(format!("unknown constant tag {other}"))),
        };
        let double_width = matches!(entry, RawConst::Long(_) | RawConst::Double(_));
        raw[i as usize] = Some(entry);
        i += 1;
        if double_width {
            if i >= pool_count {
                return Err(ClassfileError::Malformed("long/double at end of pool".into()));
            }
            raw[i as usize] = Some(RawConst::Continuation);
            i += 1;
        }
    }
    let pool = Pool::build(raw)?;

    let access_flags = r.u16()?;
    let this_class = pool.class_name(r.u16()?)?;
    let super_index = r.u16()?;
    let super_class = if super_index == 0 { None } else { Some(pool.class_name(super_index)?) };
    let interface_count = r.u16()?;
    let mut interfaces = Vec::with_capacity(interface_count as usize);
    for _ in 0..interface_count {
        interfaces.push(pool.class_name(r.u16()?)?);
    }

    let fields = parse_members(&mut r, &pool)?;
    let methods = parse_members(&mut r, &pool)?;
    let attributes = parse_attributes(&mut r, &pool)?;
    if r.pos != bytes.len() {
        return Err(ClassfileError::Malformed(format!("{} trailing bytes", bytes.len() - r.pos)));
    }

    for (kind, members) in [("field", &fields), ("method", &methods)] {
        let mut seen = std::collections::BTreeSet::new();
        for m in members {
            if !seen.insert((m.name.clone(), m.descriptor.clone())) {
                return Err(ClassfileError::Malformed(format!(
                    "duplicate {kind} {} {}",
                    lossy(&m.name),
                    lossy(&m.descriptor)
                )));
            }
        }
    }

    Ok(ClassFile {
        minor_version,
        major_version,
        access_flags,
        this_class,
        super_class,
        interfaces,
        fields,
        methods,
        attributes,
    })
}

fn parse_members(r: &mut Reader<'_>, pool: &Pool) -> Result<Vec<MemberInfo>, ClassfileError> {
    let count = r.u16()?;
    let mut members = Vec::with_capacity(count as usize);
    for _ in 0..count {
        let access_flags = r.u16()?;
        let name = pool.utf8(r.u16()?)?;
        let descriptor = pool.utf8(r.u16()?)?;
        let attributes = parse_attributes(r, pool)?;
        members.push(MemberInfo { access_flags, name, descriptor, attributes });
    }
    Ok(members)
}

fn parse_attributes(r: &mut Reader<'_>, pool: &Pool) -> Result<Vec<AttributeInfo>, ClassfileError> {
    let count = r.u16()?;
    let mut attrs = Vec::with_capacity(count as usize);
    for _ in 0..count {
        let name = pool.utf8(r.u16()?)?;
        let len = r.u32()? as usize;
        let data = r.take(len)?;
        attrs.push(parse_attribute(&name, data, pool)?);
    }
    Ok(attrs)
}

fn parse_attribute(name: &[u8], data: &[u8], pool: &Pool) -> Result<AttributeInfo, ClassfileError> {
    let mut r = Reader { data, pos: 0 };
    let attr = match name {
        b"Code" => {
            let max_stack = r.u16()?;
            let max_locals = r.u16()?;
            let code_len = r.u32()? as usize;
            let mut code = r.take(code_len)?.to_vec();
            let pool_refs = scan_code(&mut code, pool)?;
            let handler_count = r.u16()?;
            let mut exception_table = Vec::with_capacity(handler_count as usize);
            for _ in 0..handler_count {
                let start_pc = r.u16()?;
                let end_pc = r.u16()?;
                let handler_pc = r.u16()?;
                let catch_index = r.u16()?;
                let catch_type = if catch_index == 0 { None } else { Some(pool.class_name(catch_index)?) };
                exception_table.push(ExceptionHandler { start_pc, end_pc, handler_pc, catch_type });
            }
            let attributes = parse_attributes(&mut r, pool)?;
            AttributeInfo::Code(CodeAttribute { max_stack, max_locals, code, pool_refs, exception_table, attributes })
        }
        b"ConstantValue" => AttributeInfo::ConstantValue(pool.get(r.u16()?)?),
        b"Exceptions" => {
            let n = r.u16()?;
            let mut classes = Vec::with_capacity(n as usize);
            for _ in 0..n {
                classes.push(pool.class_name(r.u16()?)?);
            }
            AttributeInfo::Exceptions(classes)
        }
        b"InnerClasses" => {
            let n = r.u16()?;
            let mut entries = Vec::with_capacity(n as usize);
            for _ in 0..n {
                let inner_idx = r.u16()?;
                let outer_idx = r.u16()?;
                let name_idx = r.u16()?;
                let access_flags = r.u16()?;
                entries.push(InnerClassEntry {
                    inner: if inner_idx == 0 { None } else { Some(pool.class_name(inner_idx)?) },
                    outer: if outer_idx == 0 { None } else { Some(pool.class_name(outer_idx)?) },
                    inner_name: if name_idx == 0 { None } else { Some(pool.utf8(name_idx)?) },
                    access_flags,
                });
            }
            AttributeInfo::InnerClasses(entries)
        }
        b"EnclosingMethod" => {
            let class = pool.class_name(r.u16()?)?;
            let method_idx = r.u16()?;
            let method = if method_idx == 0 {
                None
            } else {
                match pool.get(method_idx)? {
                    Const::NameAndType { name, descriptor } => Some((name, descriptor)),
                    _ => return Err(ClassfileError::Malformed("EnclosingMethod without name-and-type".into())),
                }
            };
            AttributeInfo::EnclosingMethod { class, method }
        }
        b"Synthetic" => AttributeInfo::Synthetic,
        b"Signature" => AttributeInfo::Signature(pool.utf8(r.u16()?)?),
        b"SourceFile" => AttributeInfo::SourceFile(pool.utf8(r.u16()?)?),
        b"SourceDebugExtension" => AttributeInfo::SourceDebugExtension(data.to_vec()),
        b"LineNumberTable" => {
            let n = r.u16()?;
            let mut entries = Vec::with_capacity(n as usize);
            for _ in 0..n {
                entries.push((r.u16()?, r.u16()?));
            }
            AttributeInfo::LineNumberTable(entries)
        }
        b"LocalVariableTable" | b"LocalVariableTypeTable" => {
            let n = r.u16()?;
            let mut vars = Vec::with_capacity(n as usize);
            for _ in 0..n {
                vars.push(LocalVariable {
                    start_pc: r.u16()?,
                    length: r.u16()?,
                    name: pool.utf8(r.u16()?)?,
                    descriptor: pool.utf8(r.u16()?)?,
                    index: r.u16()?,
                });
            }
            if name == b"LocalVariableTable" {
                AttributeInfo::LocalVariableTable(vars)
            } else {
                AttributeInfo::LocalVariableTypeTable(vars)
            }
        }
        b"Deprecated" => AttributeInfo::Deprecated,
        b"RuntimeVisibleAnnotations" | b"RuntimeInvisibleAnnotations" => {
            let n = r.u16()?;
            let mut annotations = Vec::with_capacity(n as usize);
            for _ in 0..n {
                annotations.push(parse_annotation(&mut r, pool)?);
            }
            AttributeInfo::Annotations { visible: name == b"RuntimeVisibleAnnotations", annotations }
        }
        b"RuntimeVisibleParameterAnnotations" | b"RuntimeInvisibleParameterAnnotations" => {
            let n = r.u8()?;
            let mut parameters = Vec::with_capacity(n as usize);
            for _ in 0..n {
                let count = r.u16()?;
                let mut annotations = Vec::with_capacity(count as usize);
                for _ in 0..count {
                    annotations.push(parse_annotation(&mut r, pool)?);
                }
                parameters.push(annotations);
            }
            AttributeInfo::ParameterAnnotations { visible: name == b"RuntimeVisibleParameterAnnotations", parameters }
        }
        b"AnnotationDefault" => AttributeInfo::AnnotationDefault(parse_element_value(&mut r, pool)?),
        b"BootstrapMethods" => {
            let n = r.u16()?;
            let mut methods = Vec::with_capacity(n as usize);
            for _ in 0..n {
                let method = pool.get(r.u16()?)?;
                let arg_count = r.u16()?;
                let mut arguments = Vec::with_capacity(arg_count as usize);
                for _ in 0..arg_count {
                    arguments.push(pool.get(r.u16()?)?);
                }
                methods.push(BootstrapMethod { method, arguments });
            }
            AttributeInfo::BootstrapMethods(methods)
        }
        b"MethodParameters" => {
            let n = r.u8()?;
            let mut params = Vec::with_capacity(n as usize);
            for _ in 0..n {
                let name_idx = r.u16()?;
                let flags = r.u16()?;
                params.push((if name_idx == 0 { None } else { Some(pool.utf8(name_idx)?) }, flags));
            }
            AttributeInfo::MethodParameters(params)
        }
        b"NestHost" => AttributeInfo::NestHost(pool.class_name(r.u16()?)?),
        b"NestMembers" | b"PermittedSubclasses" => {
            let n = r.u16()?;
            let mut classes = Vec::with_capacity(n as usize);
            for _ in 0..n {
                classes.push(pool.class_name(r.u16()?)?);
            }
            if name == b"NestMembers" {
                AttributeInfo::NestMembers(classes)
            } else {
                AttributeInfo::PermittedSubclasses(classes)
            }
        }
        b"StackMapTable" => {
            let n = r.u16()?;
            let mut frames = Vec::with_capacity(n as usize);
            for _ in 0..n {
                frames.push(parse_frame(&mut r, pool)?);
            }
            AttributeInfo::StackMapTable(frames)
        }
        _ => {
            return Ok(AttributeInfo::Unknown { name: name.to_vec(), data: data.to_vec() });
        }
    };
    if r.pos != data.len() {
        return Err(ClassfileError::Malformed(format!(
            "attribute {} has {} unread bytes",
            lossy(name),
            data.len() - r.pos
        )));
    }
    Ok(attr)
}

fn parse_annotation(r: &mut Reader<'_>, pool: &Pool) -> Result<Annotation, ClassfileError> {
    let type_descriptor = pool.utf8(r.u16()?)?;
    let n = r.u16()?;
    let mut elements = Vec::with_capacity(n as usize);
    for _ in 0..n {
        let name = pool.utf8(r.u16()?)?;
        elements.push((name, parse_element_value(r, pool)?));
    }
    Ok(Annotation { type_descriptor, elements })
}

fn parse_element_value(r: &mut Reader<'_>, pool: &Pool) -> Result<ElementValue, ClassfileError> {
    let tag = r.u8()?;
    Ok(match tag {
        b'B' | b'C' | b'D' | b'F' | b'I' | b'J' | b'S' | b'Z' | b's' => {
            ElementValue::Const { tag, value: pool.get(r.u16()?)? }
        }
        b'e' => ElementValue::EnumConst { type_name: pool.utf8(r.u16()?)?, const_name: pool.utf8(r.u16()?)? },
        b'c' => ElementValue::ClassInfo(pool.utf8(r.u16()?)?),
        b'@' => ElementValue::Nested(parse_annotation(r, pool)?),
        b'[' => {
            let n = r.u16()?;
            let mut values = Vec::with_capacity(n as usize);
            for _ in 0..n {
                values.push(parse_element_value(r, pool)?);
            }
            ElementValue::Array(values)
        }
        other => return Err(ClassfileError::Malformed(format!("unknown element value tag {other}"))),
    })
}

fn parse_verification_type(r: &mut Reader<'_>, pool: &Pool) -> Result<VerificationType, ClassfileError> {
    Ok(match r.u8()? {
        0 => VerificationType::Top,
        1 => VerificationType::Integer,
        2 => VerificationType::Float,
        3 => VerificationType::Double,
        4 => VerificationType::Long,
        5 => VerificationType::Null,
        6 => VerificationType::UninitializedThis,
        7 => VerificationType::Object(pool.class_name(r.u16()?)?),
        8 => VerificationType::Uninitialized(r.u16()?),
        other => return Err(ClassfileError::Malformed(format!("unknown verification type {other}"))),
    })
}

fn parse_frame(r: &mut Reader<'_>, pool: &Pool) -> Result<StackMapFrame, ClassfileError> {
    let frame_type = r.u8()?;
    Ok(match frame_type {
        0..=63 => StackMapFrame::Same(frame_type),
        64..=127 => StackMapFrame::SameLocals1(frame_type, parse_verification_type(r, pool)?),
        247 => StackMapFrame::SameLocals1Extended(r.u16()?, parse_verification_type(r, pool)?),
        248..=250 => StackMapFrame::Chop(frame_type, r.u16()?),
        251 => StackMapFrame::SameExtended(r.u16()?),
        252..=254 => {
            let offset_delta = r.u16()?;
            let count = frame_type - 251;
            let mut locals = Vec::with_capacity(count as usize);
            for _ in 0..count {
                locals.push(parse_verification_type(r, pool)?);
            }
            StackMapFrame::Append(frame_type, offset_delta, locals)
        }
        255 => {
            let offset_delta = r.u16()?;
            let local_count = r.u16()?;
            let mut locals = Vec::with_capacity(local_count as usize);
            for _ in 0..local_count {
                locals.push(parse_verification_type(r, pool)?);
            }
            let stack_count = r.u16()?;
            let mut stack = Vec::with_capacity(stack_count as usize);
            for _ in 0..stack_count {
                stack.push(parse_verification_type(r, pool)?);
            }
            StackMapFrame::Full { offset_delta, locals, stack }
        }
        other => return Err(ClassfileError::Malformed(format!("reserved stack map frame type {other}"))),
    })
}

/// Walk the bytecode recording every embedded pool operand. The operand
/// bytes are masked to zero in place so the stored code is independent of
/// the original pool layout; writing patches the relocated indices back in.
pub(super) fn scan_code(code: &mut [u8], pool: &Pool) -> Result<Vec<CodeRef>, ClassfileError> {
    let mut refs = Vec::new();
    let code_len = code.len();
    let mut pc = 0usize;
    while pc < code_len {
        let op = code[pc];
        let need = move |n: usize| -> Result<(), ClassfileError> {
            if pc + n > code_len {
                Err(ClassfileError::Malformed("truncated instruction".into()))
            } else {
                Ok(())
            }
        };
        let mut record = |code: &mut [u8], narrow: bool| -> Result<(), ClassfileError> {
            let constant = if narrow {
                let c = pool.get(code[pc + 1] as u16)?;
                code[pc + 1] = 0;
                c
            } else {
                let c = pool.get(u16::from_be_bytes([code[pc + 1], code[pc + 2]]))?;
                code[pc + 1] = 0;
                code[pc + 2] = 0;
                c
            };
            refs.push(CodeRef { offset: pc + 1, narrow, constant });
            Ok(())
        };
        let len = match op {
            0x12 => {
                need(2)?;
                record(code, true)?;
                2
            }
            0x13 | 0x14 | 0xB2..=0xB8 | 0xBB | 0xBD | 0xC0 | 0xC1 => {
                need(3)?;
                record(code, false)?;
                3
            }
            0xB9 | 0xBA => {
                need(5)?;
                record(code, false)?;
                5
            }
            0xC5 => {
                need(4)?;
                record(code, false)?;
                4
            }
            0x00..=0x0F | 0x1A..=0x35 | 0x3B..=0x83 | 0x85..=0x98 | 0xAC..=0xB1 | 0xBE | 0xBF | 0xC2 | 0xC3 => 1,
            0x10 | 0x15..=0x19 | 0x36..=0x3A | 0xA9 | 0xBC => 2,
            0x11 | 0x84 | 0x99..=0xA8 | 0xC6 | 0xC7 => 3,
            0xC8 | 0xC9 => 5,
            0xC4 => {
                need(2)?;
                if code[pc + 1] == 0x84 {
                    6
                } else {
                    4
                }
            }
            0xAA => {
                let pad = (4 - ((pc + 1) % 4)) % 4;
                need(1 + pad + 12)?;
                let base = pc + 1 + pad;
                let low = i32::from_be_bytes(code[base + 4..base + 8].try_into().unwrap()) as i64;
                let high = i32::from_be_bytes(code[base + 8..base + 12].try_into().unwrap()) as i64;
                if high < low || (high - low + 1) as u64 * 4 > code_len as u64 {
                    return Err(ClassfileError::Malformed("tableswitch bounds out of range".into()));
                }
                let count = (high - low + 1) as usize;
                need(1 + pad + 12 + count * 4)?;
                1 + pad + 12 + count * 4
            }
            0xAB => {
                let pad = (4 - ((pc + 1) % 4)) % 4;
                need(1 + pad + 8)?;
                let base = pc + 1 + pad;
                let npairs = i32::from_be_bytes(code[base + 4..base + 8].try_into().unwrap()) as i64;
                if npairs < 0 || npairs as u64 * 8 > code_len as u64 {
                    return Err(ClassfileError::Malformed("lookupswitch pair count out of range".into()));
                }
                need(1 + pad + 8 + npairs as usize * 8)?;
                1 + pad + 8 + npairs as usize * 8
            }
            other => return Err(ClassfileError::Malformed(format!("unknown opcode 0x{other:02x} at pc {pc}"))),
        };
        need(len)?;
        pc += len;
    }
    Ok(refs)
}
