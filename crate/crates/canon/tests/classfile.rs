//! Classfile parse/write/canonicalize tests against hand-assembled bytes.
//!
//! The fixture bytes below are written out longhand, independent of the
//! crate's own serializer, so the parser is checked against the format
//! itself rather than against round trips through our writer.

mod support;

use canon::classfile::{
    canonicalize_classfile, describe_classfile, parse_classfile, write_classfile, AttributeInfo, CanonicalizeOptions,
    ClassfileError, CodeAttribute, Const, MemberInfo,
};
use support::{disassemble, verify_classfile_bytes};

fn u16be(v: u16) -> [u8; 2] {
    v.to_be_bytes()
}

fn u32be(v: u32) -> [u8; 4] {
    v.to_be_bytes()
}

fn utf8_const(out: &mut Vec<u8>, s: &str) {
    out.push(1);
    out.extend_from_slice(&u16be(s.len() as u16));
    out.extend_from_slice(s.as_bytes());
}

/// `public class org/example/Sample extends java/lang/Object` with one
/// field `x: I`, methods `<init>` and `m`, a LineNumberTable on `<init>`,
/// and a SourceFile attribute. Assembled by hand, pool indices fixed.
fn sample_class_bytes() -> Vec<u8> {
    let mut b = Vec::new();
    b.extend_from_slice(&u32be(0xCAFE_BABE));
    b.extend_from_slice(&u16be(0)); // minor
    b.extend_from_slice(&u16be(52)); // major, Java 8
    b.extend_from_slice(&u16be(16)); // pool count
    // #1 Methodref #3.#10
    b.push(10);
    b.extend_from_slice(&u16be(3));
    b.extend_from_slice(&u16be(10));
    // #2 Class #11, #3 Class #12
    b.push(7);
    b.extend_from_slice(&u16be(11));
    b.push(7);
    b.extend_from_slice(&u16be(12));
    // #4 "x", #5 "I", #6 "<init>", #7 "()V", #8 "Code", #9 "LineNumberTable"
    utf8_const(&mut b, "x");
    utf8_const(&mut b, "I");
    utf8_const(&mut b, "<init>");
    utf8_const(&mut b, "()V");
    utf8_const(&mut b, "Code");
    utf8_const(&mut b, "LineNumberTable");
    // #10 NameAndType #6:#7
    b.push(12);
    b.extend_from_slice(&u16be(6));
    b.extend_from_slice(&u16be(7));
    // #11, #12 class names; #13 "m"; #14 "SourceFile"; #15 "Sample.java"
    utf8_const(&mut b, "org/example/Sample");
    utf8_const(&mut b, "java/lang/Object");
    utf8_const(&mut b, "m");
    utf8_const(&mut b, "SourceFile");
    utf8_const(&mut b, "Sample.java");

    b.extend_from_slice(&u16be(0x0021)); // ACC_PUBLIC | ACC_SUPER
    b.extend_from_slice(&u16be(2)); // this
    b.extend_from_slice(&u16be(3)); // super
    b.extend_from_slice(&u16be(0)); // interfaces

    // fields
    b.extend_from_slice(&u16be(1));
    b.extend_from_slice(&u16be(0x0001));
    b.extend_from_slice(&u16be(4));
    b.extend_from_slice(&u16be(5));
    b.extend_from_slice(&u16be(0));

    // methods
    b.extend_from_slice(&u16be(2));
    // <init>()V with Code { aload_0; invokespecial #1; return } + LNT
    b.extend_from_slice(&u16be(0x0001));
    b.extend_from_slice(&u16be(6));
    b.extend_from_slice(&u16be(7));
    b.extend_from_slice(&u16be(1)); // one attribute
    b.extend_from_slice(&u16be(8)); // "Code"
    b.extend_from_slice(&u32be(29));
    b.extend_from_slice(&u16be(1)); // max_stack
    b.extend_from_slice(&u16be(1)); // max_locals
    b.extend_from_slice(&u32be(5));
    b.extend_from_slice(&[0x2A, 0xB7, 0x00, 0x01, 0xB1]);
    b.extend_from_slice(&u16be(0)); // exception table
    b.extend_from_slice(&u16be(1)); // code attributes
    b.extend_from_slice(&u16be(9)); // "LineNumberTable"
    b.extend_from_slice(&u32be(6));
    b.extend_from_slice(&u16be(1));
    b.extend_from_slice(&u16be(0)); // start_pc
    b.extend_from_slice(&u16be(1)); // line
    // m()V with Code { return }
    b.extend_from_slice(&u16be(0x0001));
    b.extend_from_slice(&u16be(13));
    b.extend_from_slice(&u16be(7));
    b.extend_from_slice(&u16be(1));
    b.extend_from_slice(&u16be(8));
    b.extend_from_slice(&u32be(13));
    b.extend_from_slice(&u16be(0));
    b.extend_from_slice(&u16be(1));
    b.extend_from_slice(&u32be(1));
    b.push(0xB1);
    b.extend_from_slice(&u16be(0));
    b.extend_from_slice(&u16be(0));

    // class attributes: SourceFile
    b.extend_from_slice(&u16be(1));
    b.extend_from_slice(&u16be(14));
    b.extend_from_slice(&u32be(2));
    b.extend_from_slice(&u16be(15));
    b
}

#[test]
fn parses_hand_assembled_class() {
    let cf = parse_classfile(&sample_class_bytes()).unwrap();
    assert_eq!(cf.major_version, 52);
    assert_eq!(cf.this_class, b"org/example/Sample");
    assert_eq!(cf.super_class.as_deref(), Some(&b"java/lang/Object"[..]));
    let method_names: Vec<&[u8]> = cf.methods.iter().map(|m| m.name.as_slice()).collect();
    assert_eq!(method_names, vec![&b"<init>"[..], &b"m"[..]]);
    assert_eq!(cf.fields.len(), 1);
    assert_eq!(cf.fields[0].name, b"x");
    let init_code = match &cf.methods[0].attributes[0] {
        AttributeInfo::Code(c) => c,
        other => panic!("expected Code, got {other:?}"),
    };
    assert_eq!(init_code.code, vec![0x2A, 0xB7, 0x00, 0x00, 0xB1], "pool operand bytes are masked");
    assert_eq!(init_code.pool_refs.len(), 1);
    assert!(matches!(&init_code.pool_refs[0].constant, Const::MethodRef { class, name, .. }
        if class == b"java/lang/Object" && name == b"<init>"));
    assert!(init_code.attributes.iter().any(|a| matches!(a, AttributeInfo::LineNumberTable(_))));
}

#[test]
fn rejects_bad_magic() {
    assert!(matches!(parse_classfile(b"not a classfile"), Err(ClassfileError::Malformed(_))));
    let mut bytes = sample_class_bytes();
    bytes[0] = 0;
    assert!(parse_classfile(&bytes).is_err());
}

#[test]
fn write_round_trips_to_equal_structure() {
    let cf = parse_classfile(&sample_class_bytes()).unwrap();
    let written = write_classfile(&cf).unwrap();
    let reparsed = parse_classfile(&written).unwrap();
    assert_eq!(reparsed, cf);
    // And the rebuilt pool is stable: writing again is byte-identical.
    assert_eq!(write_classfile(&reparsed).unwrap(), written);
}

#[test]
fn write_is_deterministic_across_100_runs() {
    let cf = parse_classfile(&sample_class_bytes()).unwrap();
    let first = write_classfile(&cf).unwrap();
    for _ in 0..100 {
        assert_eq!(write_classfile(&cf).unwrap(), first);
    }
}

#[test]
fn written_bytes_pass_independent_structural_verification() {
    let cf = parse_classfile(&sample_class_bytes()).unwrap();
    let written = write_classfile(&cf).unwrap();
    verify_classfile_bytes(&written).unwrap();
    let canonical = canonicalize_classfile(&cf, &CanonicalizeOptions::default()).unwrap();
    verify_classfile_bytes(&write_classfile(&canonical).unwrap()).unwrap();
}

/// Swap the two method_info records at the byte level, producing the same
/// class compiled "in a different order".
fn sample_with_swapped_methods() -> Vec<u8> {
    let original = sample_class_bytes();
    let cf = parse_classfile(&original).unwrap();
    let mut swapped = cf.clone();
    swapped.methods.reverse();
    write_classfile(&swapped).unwrap()
}

#[test]
fn method_order_variants_canonicalize_to_identical_bytes() {
    let a = sample_class_bytes();
    let b = sample_with_swapped_methods();
    assert_ne!(a, b);
    let opts = CanonicalizeOptions::default();
    let ca = write_classfile(&canonicalize_classfile(&parse_classfile(&a).unwrap(), &opts).unwrap()).unwrap();
    let cb = write_classfile(&canonicalize_classfile(&parse_classfile(&b).unwrap(), &opts).unwrap()).unwrap();
    assert_eq!(ca, cb);
}

#[test]
fn debug_attributes_are_stripped() {
    let cf = parse_classfile(&sample_class_bytes()).unwrap();
    let canonical = canonicalize_classfile(&cf, &CanonicalizeOptions::default()).unwrap();
    let listing = describe_classfile(&canonical);
    assert!(!listing.contains("LineNumberTable"));
    assert!(!listing.contains("SourceFile"));
    // Code shape is untouched.
    let init = canonical.methods.iter().find(|m| m.name == b"<init>").unwrap();
    let code = match &init.attributes[0] {
        AttributeInfo::Code(c) => c,
        other => panic!("expected Code, got {other:?}"),
    };
    assert_eq!(code.max_stack, 1);
    assert_eq!(code.max_locals, 1);
    assert_eq!(code.code, vec![0x2A, 0xB7, 0x00, 0x00, 0xB1]);
}

#[test]
fn canonicalization_is_idempotent() {
    let opts = CanonicalizeOptions::default();
    let cf = parse_classfile(&sample_class_bytes()).unwrap();
    let once = canonicalize_classfile(&cf, &opts).unwrap();
    let twice = canonicalize_classfile(&once, &opts).unwrap();
    assert_eq!(write_classfile(&once).unwrap(), write_classfile(&twice).unwrap());
}

#[test]
fn canonicalization_preserves_semantics_per_independent_disassembler() {
    for bytes in [sample_class_bytes(), sample_with_swapped_methods()] {
        let original = disassemble(&bytes).unwrap();
        let cf = parse_classfile(&bytes).unwrap();
        let canonical = write_classfile(&canonicalize_classfile(&cf, &CanonicalizeOptions::default()).unwrap()).unwrap();
        let after = disassemble(&canonical).unwrap();
        assert_eq!(original.member_summary(), after.member_summary());
    }
}

#[test]
fn unknown_attribute_with_payload_blocks_canonicalization() {
    let mut cf = parse_classfile(&sample_class_bytes()).unwrap();
    cf.attributes.push(AttributeInfo::Unknown { name: b"Scala".to_vec(), data: vec![0, 3] });
    assert!(matches!(
        canonicalize_classfile(&cf, &CanonicalizeOptions::default()),
        Err(ClassfileError::Unrelocatable(_))
    ));
    assert!(write_classfile(&cf).is_err());
    // Empty unknown attributes carry no indices and are fine.
    let mut ok = parse_classfile(&sample_class_bytes()).unwrap();
    ok.attributes.push(AttributeInfo::Unknown { name: b"Marker".to_vec(), data: Vec::new() });
    assert!(canonicalize_classfile(&ok, &CanonicalizeOptions::default()).is_ok());
}

#[test]
fn narrow_ldc_constants_stay_below_index_256() {
    // Interleave an ldc-referenced string with hundreds of other constants;
    // the writer must keep the ldc operand in one byte.
    let cf = parse_classfile(&sample_class_bytes()).unwrap();
    let mut big = cf.clone();
    for i in 0..300 {
        big.fields.push(MemberInfo {
            access_flags: 0x0009, // public static
            name: format!("F{i:03}").into_bytes(),
            descriptor: b"I".to_vec(),
            attributes: vec![AttributeInfo::ConstantValue(Const::Integer(i))],
        });
    }
    let code = CodeAttribute {
        max_stack: 1,
        max_locals: 1,
        code: vec![0x12, 0x00, 0x57, 0xB1], // ldc <patched>; pop; return
        pool_refs: vec![canon::classfile::CodeRef {
            offset: 1,
            narrow: true,
            constant: Const::Str(b"the loadable string".to_vec()),
        }],
        exception_table: Vec::new(),
        attributes: Vec::new(),
    };
    big.methods.push(MemberInfo {
        access_flags: 0x0009,
        name: b"lots".to_vec(),
        descriptor: b"()V".to_vec(),
        attributes: vec![AttributeInfo::Code(code)],
    });
    let written = write_classfile(&big).unwrap();
    let reparsed = parse_classfile(&written).unwrap();
    let lots = reparsed.methods.iter().find(|m| m.name == b"lots").unwrap();
    let code = match &lots.attributes[0] {
        AttributeInfo::Code(c) => c,
        other => panic!("expected Code, got {other:?}"),
    };
    assert!(matches!(&code.pool_refs[0].constant, Const::Str(s) if s == b"the loadable string"));
    verify_classfile_bytes(&written).unwrap();
}

#[test]
fn annotation_array_sorting_is_opt_in() {
    use canon::classfile::{Annotation, ElementValue};
    let enum_value = |name: &[u8]| ElementValue::EnumConst {
        type_name: b"Ljakarta/xml/bind/annotation/XmlElementRef;".to_vec(),
        const_name: name.to_vec(),
    };
    let with_order = |names: &[&[u8]]| {
        let mut cf = parse_classfile(&sample_class_bytes()).unwrap();
        cf.attributes.push(AttributeInfo::Annotations {
            visible: true,
            annotations: vec![Annotation {
                type_descriptor: b"Ljakarta/xml/bind/annotation/XmlElementRefs;".to_vec(),
                elements: vec![(b"value".to_vec(), ElementValue::Array(names.iter().map(|n| enum_value(n)).collect()))],
            }],
        });
        cf
    };
    let forward = with_order(&[b"alpha", b"beta"]);
    let reversed = with_order(&[b"beta", b"alpha"]);

    // Default options preserve element order: the difference survives.
    let keep = CanonicalizeOptions::default();
    let kept_a = write_classfile(&canonicalize_classfile(&forward, &keep).unwrap()).unwrap();
    let kept_b = write_classfile(&canonicalize_classfile(&reversed, &keep).unwrap()).unwrap();
    assert_ne!(kept_a, kept_b, "array order is semantically relevant and kept by default");

    // Opting in sorts both to the same canonical bytes.
    let sort = CanonicalizeOptions { sort_annotation_arrays: true, ..Default::default() };
    let sorted_a = write_classfile(&canonicalize_classfile(&forward, &sort).unwrap()).unwrap();
    let sorted_b = write_classfile(&canonicalize_classfile(&reversed, &sort).unwrap()).unwrap();
    assert_eq!(sorted_a, sorted_b);
}

#[test]
fn stack_map_table_survives_with_relocated_indices() {
    use canon::classfile::{StackMapFrame, VerificationType};
    let mut cf = parse_classfile(&sample_class_bytes()).unwrap();
    let m = cf.methods.iter_mut().find(|m| m.name == b"m").unwrap();
    let AttributeInfo::Code(code) = &mut m.attributes[0] else { panic!("expected Code") };
    code.attributes.push(AttributeInfo::StackMapTable(vec![
        StackMapFrame::Same(0),
        StackMapFrame::Append(252, 4, vec![VerificationType::Object(b"org/example/Sample".to_vec())]),
        StackMapFrame::Full {
            offset_delta: 9,
            locals: vec![VerificationType::Integer, VerificationType::Object(b"java/lang/String".to_vec())],
            stack: vec![VerificationType::Long],
        },
    ]));

    // Round trip: frames reparse identically even though the pool moved.
    let written = write_classfile(&cf).unwrap();
    verify_classfile_bytes(&written).unwrap();
    let reparsed = parse_classfile(&written).unwrap();
    assert_eq!(reparsed, cf);

    // Canonicalization reorders members and rebuilds the pool; the frames
    // come through verbatim.
    let canonical = canonicalize_classfile(&cf, &CanonicalizeOptions::default()).unwrap();
    let canonical_bytes = write_classfile(&canonical).unwrap();
    let reparsed = parse_classfile(&canonical_bytes).unwrap();
    let m = reparsed.methods.iter().find(|m| m.name == b"m").unwrap();
    let AttributeInfo::Code(code) = &m.attributes[0] else { panic!("expected Code") };
    assert!(matches!(
        &code.attributes[..],
        [AttributeInfo::StackMapTable(frames)] if frames.len() == 3
    ));
}

#[test]
fn pool_overflow_is_reported() {
    let mut cf = parse_classfile(&sample_class_bytes()).unwrap();
    // Distinct long constants take two pool slots each; 33k of them plus
    // their field names overflow the 65534-entry pool.
    for i in 0..33_000i64 {
        cf.fields.push(MemberInfo {
            access_flags: 0x0019,
            name: format!("L{i:05}").into_bytes(),
            descriptor: b"J".to_vec(),
            attributes: vec![AttributeInfo::ConstantValue(Const::Long(i))],
        });
    }
    assert!(matches!(write_classfile(&cf), Err(ClassfileError::PoolOverflow)));
}

#[test]
fn version_field_passes_through() {
    let mut cf = parse_classfile(&sample_class_bytes()).unwrap();
    cf.major_version = 61;
    cf.minor_version = 0;
    let reparsed = parse_classfile(&write_classfile(&cf).unwrap()).unwrap();
    assert_eq!((reparsed.major_version, reparsed.minor_version), (61, 0));
}
