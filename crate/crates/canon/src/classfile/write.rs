//! Classfile serialization with a deterministically rebuilt constant pool.
//!
//! The pool is populated in first-use order of a fixed traversal. Constants
//! referenced by `ldc` (one-byte index) are interned first so they always
//! land below index 256.

use super::*;
use std::collections::HashMap;

struct PoolBuilder {
    entries: Vec<Const>,
    index: HashMap<Const, u16>,
    next: u16,
}

impl PoolBuilder {
    fn new() -> Self {
        PoolBuilder { entries: Vec::new(), index: HashMap::new(), next: 1 }
    }

    fn intern(&mut self, constant: &Const) -> Result<u16, ClassfileError> {
        if let Some(&i) = self.index.get(constant) {
            return Ok(i);
        }
        // Children first, so composite entries reference already-assigned
        // slots; the order is deterministic either way.
        match constant {
            Const::Class(n) | Const::Str(n) | Const::MethodType(n) | Const::Module(n) | Const::Package(n) => {
                self.intern(&Const::Utf8(n.clone()))?;
            }
            Const::FieldRef { class, name, descriptor }
            | Const::MethodRef { class, name, descriptor }
            | Const::InterfaceMethodRef { class, name, descriptor } => {
                self.intern(&Const::Class(class.clone()))?;
                self.intern(&Const::NameAndType { name: name.clone(), descriptor: descriptor.clone() })?;
            }
            Const::NameAndType { name, descriptor } => {
                self.intern(&Const::Utf8(name.clone()))?;
                self.intern(&Const::Utf8(descriptor.clone()))?;
            }
            Const::MethodHandle { reference, .. } => {
                self.intern(reference)?;
            }
            Const::Dynamic { name, descriptor, .. } | Const::InvokeDynamic { name, descriptor, .. } => {
                self.intern(&Const::NameAndType { name: name.clone(), descriptor: descriptor.clone() })?;
            }
            _ => {}
        }
        let slot = self.next;
        let width = if matches!(constant, Const::Long(_) | Const::Double(_)) { 2 } else { 1 };
        if slot as u32 + width as u32 > 65_535 {
            return Err(ClassfileError::PoolOverflow);
        }
        self.next += width;
        self.entries.push(constant.clone());
        self.index.insert(constant.clone(), slot);
        Ok(slot)
    }

    fn utf8(&mut self, bytes: &[u8]) -> Result<u16, ClassfileError> {
        self.intern(&Const::Utf8(bytes.to_vec()))
    }

    fn class(&mut self, name: &[u8]) -> Result<u16, ClassfileError> {
        self.intern(&Const::Class(name.to_vec()))
    }

    fn serialize(&self, out: &mut Vec<u8>) {
        out.extend_from_slice(&self.next.to_be_bytes());
        for entry in &self.entries {
            match entry {
                Const::Utf8(bytes) => {
                    out.push(1);
                    out.extend_from_slice(&(bytes.len() as u16).to_be_bytes());
                    out.extend_from_slice(bytes);
                }
                Const::Integer(v) => {
                    out.push(3);
                    out.extend_from_slice(&v.to_be_bytes());
                }
                Const::Float(bits) => {
                    out.push(4);
                    out.extend_from_slice(&bits.to_be_bytes());
                }
                Const::Long(v) => {
                    out.push(5);
                    out.extend_from_slice(&v.to_be_bytes());
                }
                Const::Double(bits) => {
                    out.push(6);
                    out.extend_from_slice(&bits.to_be_bytes());
                }
                Const::Class(n) => {
                    out.push(7);
                    out.extend_from_slice(&self.index[&Const::Utf8(n.clone())].to_be_bytes());
                }
                Const::Str(n) => {
                    out.push(8);
                    out.extend_from_slice(&self.index[&Const::Utf8(n.clone())].to_be_bytes());
                }
                Const::FieldRef { class, name, descriptor }
                | Const::MethodRef { class, name, descriptor }
                | Const::InterfaceMethodRef { class, name, descriptor } => {
                    out.push(match entry {
                        Const::FieldRef { .. } => 9,
                        Const::MethodRef { .. } => 10,
                        _ => 11,
                    });
                    out.extend_from_slice(&self.index[&Const::Class(class.clone())].to_be_bytes());
                    let nat = Const::NameAndType { name: name.clone(), descriptor: descriptor.clone() };
                    out.extend_from_slice(&self.index[&nat].to_be_bytes());
                }
                Const::NameAndType { name, descriptor } => {
                    out.push(12);
                    out.extend_from_slice(&self.index[&Const::Utf8(name.clone())].to_be_bytes());
                    out.extend_from_slice(&self.index[&Const::Utf8(descriptor.clone())].to_be_bytes());
                }
                Const::MethodHandle { kind, reference } => {
                    out.push(15);
                    out.push(*kind);
                    out.extend_from_slice(&self.index[reference.as_ref()].to_be_bytes());
                }
                Const::MethodType(d) => {
                    out.push(16);
                    out.extend_from_slice(&self.index[&Const::Utf8(d.clone())].to_be_bytes());
                }
                Const::Dynamic { bootstrap, name, descriptor } | Const::InvokeDynamic { bootstrap, name, descriptor } => {
                    out.push(if matches!(entry, Const::Dynamic { .. }) { 17 } else { 18 });
                    out.extend_from_slice(&bootstrap.to_be_bytes());
                    let nat = Const::NameAndType { name: name.clone(), descriptor: descriptor.clone() };
                    out.extend_from_slice(&self.index[&nat].to_be_bytes());
                }
                Const::Module(n) => {
                    out.push(19);
                    out.extend_from_slice(&self.index[&Const::Utf8(n.clone())].to_be_bytes());
                }
                Const::Package(n) => {
                    out.push(20);
                    out.extend_from_slice(&self.index[&Const::Utf8(n.clone())].to_be_bytes());
                }
            }
        }
    }
}

/// First interning pass: every constant the structure will reference, in
/// the exact order serialization visits them, with `ldc`-referenced
/// constants up front.
fn intern_all(cf: &ClassFile, pool: &mut PoolBuilder) -> Result<(), ClassfileError> {
    fn narrow_refs(attrs: &[AttributeInfo], pool: &mut PoolBuilder) -> Result<(), ClassfileError> {
        for attr in attrs {
            if let AttributeInfo::Code(code) = attr {
                for r in &code.pool_refs {
                    if r.narrow {
                        pool.intern(&r.constant)?;
                    }
                }
                narrow_refs(&code.attributes, pool)?;
            }
        }
        Ok(())
    }
    for member in cf.fields.iter().chain(&cf.methods) {
        narrow_refs(&member.attributes, pool)?;
    }
    narrow_refs(&cf.attributes, pool)?;

    pool.class(&cf.this_class)?;
    if let Some(s) = &cf.super_class {
        pool.class(s)?;
    }
    for i in &cf.interfaces {
        pool.class(i)?;
    }
    for member in cf.fields.iter().chain(&cf.methods) {
        pool.utf8(&member.name)?;
        pool.utf8(&member.descriptor)?;
        intern_attributes(&member.attributes, pool)?;
    }
    intern_attributes(&cf.attributes, pool)?;
    Ok(())
}

fn intern_attributes(attrs: &[AttributeInfo], pool: &mut PoolBuilder) -> Result<(), ClassfileError> {
    for attr in attrs {
        pool.utf8(attr.name())?;
        match attr {
            AttributeInfo::Code(code) => {
                for r in &code.pool_refs {
                    pool.intern(&r.constant)?;
                }
                for h in &code.exception_table {
                    if let Some(c) = &h.catch_type {
                        pool.class(c)?;
                    }
                }
                intern_attributes(&code.attributes, pool)?;
            }
            AttributeInfo::ConstantValue(c) => {
                pool.intern(c)?;
            }
            AttributeInfo::Exceptions(classes) | AttributeInfo::NestMembers(classes) | AttributeInfo::PermittedSubclasses(classes) => {
                for c in classes {
                    pool.class(c)?;
                }
            }
            AttributeInfo::InnerClasses(entries) => {
                for e in entries {
                    if let Some(c) = &e.inner {
                        pool.class(c)?;
                    }
                    if let Some(c) = &e.outer {
                        pool.class(c)?;
                    }
                    if let Some(n) = &e.inner_name {
                        pool.utf8(n)?;
                    }
                }
            }
            AttributeInfo::EnclosingMethod { class, method } => {
                pool.class(class)?;
                if let Some((n, d)) = method {
                    pool.intern(&Const::NameAndType { name: n.clone(), descriptor: d.clone() })?;
                }
            }
            AttributeInfo::Signature(s) | AttributeInfo::SourceFile(s) => {
                pool.utf8(s)?;
            }
            AttributeInfo::LocalVariableTable(vars) | AttributeInfo::LocalVariableTypeTable(vars) => {
                for v in vars {
                    pool.utf8(&v.name)?;
                    pool.utf8(&v.descriptor)?;
                }
            }
            AttributeInfo::Annotations { annotations, .. } => {
                for a in annotations {
                    intern_annotation(a, pool)?;
                }
            }
            AttributeInfo::ParameterAnnotations { parameters, .. } => {
                for p in parameters {
                    for a in p {
                        intern_annotation(a, pool)?;
                    }
                }
            }
            AttributeInfo::AnnotationDefault(v) => intern_element_value(v, pool)?,
            AttributeInfo::BootstrapMethods(methods) => {
                for m in methods {
                    pool.intern(&m.method)?;
                    for arg in &m.arguments {
                        pool.intern(arg)?;
                    }
                }
            }
            AttributeInfo::MethodParameters(params) => {
                for (name, _) in params {
                    if let Some(n) = name {
                        pool.utf8(n)?;
                    }
                }
            }
            AttributeInfo::NestHost(c) => {
                pool.class(c)?;
            }
            AttributeInfo::StackMapTable(frames) => {
                for f in frames {
                    let types: Vec<&VerificationType> = match f {
                        StackMapFrame::SameLocals1(_, t) | StackMapFrame::SameLocals1Extended(_, t) => vec![t],
                        StackMapFrame::Append(_, _, ts) => ts.iter().collect(),
                        StackMapFrame::Full { locals, stack, .. } => locals.iter().chain(stack).collect(),
                        _ => Vec::new(),
                    };
                    for t in types {
                        if let VerificationType::Object(c) = t {
                            pool.class(c)?;
                        }
                    }
                }
            }
            AttributeInfo::Unknown { .. }
            | AttributeInfo::Synthetic
            | AttributeInfo::Deprecated
            | AttributeInfo::SourceDebugExtension(_)
            | AttributeInfo::LineNumberTable(_) => {}
        }
    }
    Ok(())
}

fn intern_annotation(a: &Annotation, pool: &mut PoolBuilder) -> Result<(), ClassfileError> {
    pool.utf8(&a.type_descriptor)?;
    for (name, value) in &a.elements {
        pool.utf8(name)?;
        intern_element_value(value, pool)?;
    }
    Ok(())
}

fn intern_element_value(v: &ElementValue, pool: &mut PoolBuilder) -> Result<(), ClassfileError> {
    match v {
        ElementValue::Const { value, .. } => {
            pool.intern(value)?;
        }
        ElementValue::EnumConst { type_name, const_name } => {
            pool.utf8(type_name)?;
            pool.utf8(const_name)?;
        }
        ElementValue::ClassInfo(c) => {
            pool.utf8(c)?;
        }
        ElementValue::Nested(a) => intern_annotation(a, pool)?,
        ElementValue::Array(items) => {
            for item in items {
                intern_element_value(item, pool)?;
            }
        }
    }
    Ok(())
}

fn push_u16(out: &mut Vec<u8>, v: u16) {
    out.extend_from_slice(&v.to_be_bytes());
}

fn push_u32(out: &mut Vec<u8>, v: u32) {
    out.extend_from_slice(&v.to_be_bytes());
}

fn write_attribute(attr: &AttributeInfo, pool: &PoolBuilder, out: &mut Vec<u8>) -> Result<(), ClassfileError> {
    push_u16(out, pool.index[&Const::Utf8(attr.name().to_vec())]);
    let mut body = Vec::new();
    let idx = |c: &Const| pool.index[c];
    let utf8_idx = |b: &[u8]| pool.index[&Const::Utf8(b.to_vec())];
    let class_idx = |b: &[u8]| pool.index[&Const::Class(b.to_vec())];
    match attr {
        AttributeInfo::Code(code) => {
            push_u16(&mut body, code.max_stack);
            push_u16(&mut body, code.max_locals);
            push_u32(&mut body, code.code.len() as u32);
            let mut bytes = code.code.clone();
            for r in &code.pool_refs {
                let new_index = idx(&r.constant);
                if r.narrow {
                    debug_assert!(new_index <= u8::MAX as u16, "narrow constants are interned first");
                    bytes[r.offset] = new_index as u8;
                } else {
                    bytes[r.offset..r.offset + 2].copy_from_slice(&new_index.to_be_bytes());
                }
            }
            body.extend_from_slice(&bytes);
            push_u16(&mut body, code.exception_table.len() as u16);
            for h in &code.exception_table {
                push_u16(&mut body, h.start_pc);
                push_u16(&mut body, h.end_pc);
                push_u16(&mut body, h.handler_pc);
                push_u16(&mut body, h.catch_type.as_ref().map_or(0, |c| class_idx(c)));
            }
            push_u16(&mut body, code.attributes.len() as u16);
            for a in &code.attributes {
                write_attribute(a, pool, &mut body)?;
            }
        }
        AttributeInfo::ConstantValue(c) => push_u16(&mut body, idx(c)),
        AttributeInfo::Exceptions(classes) | AttributeInfo::NestMembers(classes) | AttributeInfo::PermittedSubclasses(classes) => {
            push_u16(&mut body, classes.len() as u16);
            for c in classes {
                push_u16(&mut body, class_idx(c));
            }
        }
        AttributeInfo::InnerClasses(entries) => {
            push_u16(&mut body, entries.len() as u16);
            for e in entries {
                push_u16(&mut body, e.inner.as_ref().map_or(0, |c| class_idx(c)));
                push_u16(&mut body, e.outer.as_ref().map_or(0, |c| class_idx(c)));
                push_u16(&mut body, e.inner_name.as_ref().map_or(0, |n| utf8_idx(n)));
                push_u16(&mut body, e.access_flags);
            }
        }
        AttributeInfo::EnclosingMethod { class, method } => {
            push_u16(&mut body, class_idx(class));
            push_u16(
                &mut body,
                method
                    .as_ref()
                    .map_or(0, |(n, d)| pool.index[&Const::NameAndType { name: n.clone(), descriptor: d.clone() }]),
            );
        }
        AttributeInfo::Synthetic | AttributeInfo::Deprecated => {}
        AttributeInfo::Signature(s) | AttributeInfo::SourceFile(s) => push_u16(&mut body, utf8_idx(s)),
        AttributeInfo::SourceDebugExtension(data) => body.extend_from_slice(data),
        AttributeInfo::LineNumberTable(entries) => {
            push_u16(&mut body, entries.len() as u16);
            for (pc, line) in entries {
                push_u16(&mut body, *pc);
                push_u16(&mut body, *line);
            }
        }
        AttributeInfo::LocalVariableTable(vars) | AttributeInfo::LocalVariableTypeTable(vars) => {
            push_u16(&mut body, vars.len() as u16);
            for v in vars {
                push_u16(&mut body, v.start_pc);
                push_u16(&mut body, v.length);
                push_u16(&mut body, utf8_idx(&v.name));
                push_u16(&mut body, utf8_idx(&v.descriptor));
                push_u16(&mut body, v.index);
            }
        }
        AttributeInfo::Annotations { annotations, .. } => {
            push_u16(&mut body, annotations.len() as u16);
            for a in annotations {
                write_annotation(a, pool, &mut body);
            }
        }
        AttributeInfo::ParameterAnnotations { parameters, .. } => {
            body.push(parameters.len() as u8);
            for p in parameters {
                push_u16(&mut body, p.len() as u16);
                for a in p {
                    write_annotation(a, pool, &mut body);
                }
            }
        }
        AttributeInfo::AnnotationDefault(v) => write_element_value(v, pool, &mut body),
        AttributeInfo::BootstrapMethods(methods) => {
            push_u16(&mut body, methods.len() as u16);
            for m in methods {
                push_u16(&mut body, idx(&m.method));
                push_u16(&mut body, m.arguments.len() as u16);
                for arg in &m.arguments {
                    push_u16(&mut body, idx(arg));
                }
            }
        }
        AttributeInfo::MethodParameters(params) => {
            body.push(params.len() as u8);
            for (name, flags) in params {
                push_u16(&mut body, name.as_ref().map_or(0, |n| utf8_idx(n)));
                push_u16(&mut body, *flags);
            }
        }
        AttributeInfo::NestHost(c) => push_u16(&mut body, class_idx(c)),
        AttributeInfo::StackMapTable(frames) => {
            push_u16(&mut body, frames.len() as u16);
            for f in frames {
                write_frame(f, pool, &mut body);
            }
        }
        AttributeInfo::Unknown { data, .. } => body.extend_from_slice(data),
    }
    push_u32(out, body.len() as u32);
    out.extend_from_slice(&body);
    Ok(())
}

fn write_annotation(a: &Annotation, pool: &PoolBuilder, out: &mut Vec<u8>) {
    push_u16(out, pool.index[&Const::Utf8(a.type_descriptor.clone())]);
    push_u16(out, a.elements.len() as u16);
    for (name, value) in &a.elements {
        push_u16(out, pool.index[&Const::Utf8(name.clone())]);
        write_element_value(value, pool, out);
    }
}

fn write_element_value(v: &ElementValue, pool: &PoolBuilder, out: &mut Vec<u8>) {
    match v {
        ElementValue::Const { tag, value } => {
            out.push(*tag);
            push_u16(out, pool.index[value]);
        }
        ElementValue::EnumConst { type_name, const_name } => {
            out.push(b'e');
            push_u16(out, pool.index[&Const::Utf8(type_name.clone())]);
            push_u16(out, pool.index[&Const::Utf8(const_name.clone())]);
        }
        ElementValue::ClassInfo(c) => {
            out.push(b'c');
            push_u16(out, pool.index[&Const::Utf8(c.clone())]);
        }
        ElementValue::Nested(a) => {
            out.push(b'@');
            write_annotation(a, pool, out);
        }
        ElementValue::Array(items) => {
            out.push(b'[');
            push_u16(out, items.len() as u16);
            for item in items {
                write_element_value(item, pool, out);
            }
        }
    }
}

fn write_verification_type(t: &VerificationType, pool: &PoolBuilder, out: &mut Vec<u8>) {
    match t {
        VerificationType::Top => out.push(0),
        VerificationType::Integer => out.push(1),
        VerificationType::Float => out.push(2),
        VerificationType::Double => out.push(3),
        VerificationType::Long => out.push(4),
        VerificationType::Null => out.push(5),
        VerificationType::UninitializedThis => out.push(6),
        VerificationType::Object(c) => {
            out.push(7);
            push_u16(out, pool.index[&Const::Class(c.clone())]);
        }
        VerificationType::Uninitialized(offset) => {
            out.push(8);
            push_u16(out, *offset);
        }
    }
}

fn write_frame(f: &StackMapFrame, pool: &PoolBuilder, out: &mut Vec<u8>) {
    match f {
        StackMapFrame::Same(t) => out.push(*t),
        StackMapFrame::SameLocals1(t, v) => {
            out.push(*t);
            write_verification_type(v, pool, out);
        }
        StackMapFrame::SameLocals1Extended(offset, v) => {
            out.push(247);
            push_u16(out, *offset);
            write_verification_type(v, pool, out);
        }
        StackMapFrame::Chop(t, offset) => {
            out.push(*t);
            push_u16(out, *offset);
        }
        StackMapFrame::SameExtended(offset) => {
            out.push(251);
            push_u16(out, *offset);
        }
        StackMapFrame::Append(t, offset, locals) => {
            out.push(*t);
            push_u16(out, *offset);
            for l in locals {
                write_verification_type(l, pool, out);
            }
        }
        StackMapFrame::Full { offset_delta, locals, stack } => {
            out.push(255);
            push_u16(out, *offset_delta);
            push_u16(out, locals.len() as u16);
            for l in locals {
                write_verification_type(l, pool, out);
            }
            push_u16(out, stack.len() as u16);
            for s in stack {
                write_verification_type(s, pool, out);
            }
        }
    }
}

/// Serialize a classfile. Deterministic; the version fields pass through
/// unchanged and the output reparses to an equal structure.
pub fn write_classfile(cf: &ClassFile) -> Result<Vec<u8>, ClassfileError> {
    cf.relocatable()?;
    let mut pool = PoolBuilder::new();
    intern_all(cf, &mut pool)?;

    let mut out = Vec::new();
    push_u32(&mut out, 0xCAFE_BABE);
    push_u16(&mut out, cf.minor_version);
    push_u16(&mut out, cf.major_version);
    pool.serialize(&mut out);
    push_u16(&mut out, cf.access_flags);
    push_u16(&mut out, pool.index[&Const::Class(cf.this_class.clone())]);
    push_u16(&mut out, cf.super_class.as_ref().map_or(0, |s| pool.index[&Const::Class(s.clone())]));
    push_u16(&mut out, cf.interfaces.len() as u16);
    for i in &cf.interfaces {
        push_u16(&mut out, pool.index[&Const::Class(i.clone())]);
    }
    for members in [&cf.fields, &cf.methods] {
        push_u16(&mut out, members.len() as u16);
        for m in members {
            push_u16(&mut out, m.access_flags);
            push_u16(&mut out, pool.index[&Const::Utf8(m.name.clone())]);
            push_u16(&mut out, pool.index[&Const::Utf8(m.descriptor.clone())]);
            push_u16(&mut out, m.attributes.len() as u16);
            for a in &m.attributes {
                write_attribute(a, &pool, &mut out)?;
            }
        }
    }
    push_u16(&mut out, cf.attributes.len() as u16);
    for a in &cf.attributes {
        write_attribute(a, &pool, &mut out)?;
    }
    Ok(out)
}
