import json
from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from buglocate.codestruct import parse_source, parse_structure, strip_comments_and_literals
from buglocate.corpus import SnapshotFile

FIXTURES = Path(__file__).parent / "fixtures"
JAVA_DIR = FIXTURES / "java"
# Class and method names of each fixture as reported by a full Java parser.
EXPECTED = json.loads((FIXTURES / "java_structure.json").read_text(encoding="utf-8"))


def test_simple_file():
    fs = parse_structure(SnapshotFile("a/b/Foo.java", "package a.b; public class Foo { void bar() {} }"))
    assert fs.package == "a.b"
    assert fs.classes == ("Foo",)
    assert fs.methods == ("bar",)
    assert (fs.file_name, fs.base_name) == ("Foo.java", "Foo")


def test_empty_file():
    fs = parse_source("src/X.java", "")
    assert fs.classes == () and fs.methods == () and fs.imports == ()
    assert (fs.file_name, fs.base_name, fs.package) == ("X.java", "X", "")


def test_nested_class():
    assert parse_source("A.java", "class A { class B {} }").classes == ("A", "B")


def test_constructors_count_as_methods():
    fs = parse_source("Foo.java", "class Foo { Foo() {} Foo(int x) { this(); } void run() {} }")
    assert fs.methods == ("Foo", "run")


def test_imports():
    src = """
    package p;
    import java.util.List;
    import static org.junit.Assert.assertEquals;
    import java.io.*;
    class A {}
    """
    assert parse_source("p/A.java", src).imports == ("java.util.List", "org.junit.Assert.assertEquals", "java.io.*")


def test_comments_and_strings_do_not_declare_anything():
    src = '''
    /* class Ghost { void boo() {} } */
    class Real {
        // void commented() {}
        String s = "class Fake { void nope() {} }";
        char c = '{';
        void real() {}
    }
    '''
    fs = parse_source("Real.java", src)
    assert fs.classes == ("Real",)
    assert fs.methods == ("real",)


def test_strip_keeps_line_structure():
    src = 'a // x\n"b\nc" /* d\n e */ f'
    out = strip_comments_and_literals(src)
    assert out.count("\n") == src.count("\n")
    assert len(out) == len(src)


def test_calls_and_control_flow_are_not_methods():
    src = """
    class A {
        int f(int x) {
            if (x > 0) { return g(x); }
            while (x < 0) x++;
            for (int i = 0; i < 3; i++) { h(i); }
            synchronized (this) { x = compute(x); }
            return new Integer(x).intValue();
        }
        int g(int y) { return y; }
        void h(int z) {}
    }
    """
    assert parse_source("A.java", src).methods == ("f", "g", "h")


def test_generic_and_annotated_declarations():
    src = """
    public class Box<T extends Comparable<T>> {
        @Override
        public <R> List<R> map(Function<? super T, ? extends R> fn) throws IOException { return null; }
        @SuppressWarnings({"unchecked"}) T[] toArray() { return null; }
    }
    """
    fs = parse_source("Box.java", src)
    assert fs.classes == ("Box",)
    assert fs.methods == ("map", "toArray")


@pytest.mark.parametrize("name", sorted(EXPECTED))
def test_fixture_corpus_matches_reference_parser(name):
    content = (JAVA_DIR / name).read_text(encoding="utf-8")
    fs = parse_source("src/" + name, content)
    assert sorted(fs.classes) == EXPECTED[name]["classes"]
    assert sorted(fs.methods) == EXPECTED[name]["methods"]
    assert len(set(fs.classes)) == len(fs.classes)
    assert len(set(fs.methods)) == len(fs.methods)
    assert fs.file_name == name


def test_fixture_corpus_has_25_files():
    assert len(EXPECTED) == 25
    assert sorted(p.name for p in JAVA_DIR.glob("*.java")) == sorted(EXPECTED)


@pytest.mark.parametrize(
    "src",
    [
        "class {",
        "class A { void f( { }",
        "}}}} class",
        '"unterminated',
        "/* unterminated",
        "enum",
        "class A extends { interface }",
        "@interface",
        "class A { A(",
    ],
)
def test_malformed_input_does_not_fail(src):
    parse_source("Broken.java", src)


@settings(max_examples=300, deadline=None)
@given(st.text(alphabet=st.sampled_from(list("classinterfaceenumvoid(){};<>@.=,\"'/* \nABCxyz")), max_size=120))
def test_parser_is_total(src):
    fs = parse_source("X.java", src)
    assert fs.file_name == "X.java"
    assert len(set(fs.classes)) == len(fs.classes)
    assert len(set(fs.methods)) == len(fs.methods)
