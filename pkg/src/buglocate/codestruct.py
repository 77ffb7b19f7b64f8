"""Tolerant extraction of package, imports, type and method names from Java source.

This is a single pass over a token stream with brace-depth tracking, not a
Java grammar: it never raises, and on broken input it returns whatever
declarations it recognized.
"""

import re
from dataclasses import dataclass

_NOISE = re.compile(
    r'//[^\n]*'
    r'|/\*.*?(?:\*/|\Z)'
    r'|"""(?:.|\n)*?(?:"""|\Z)'
    r'|"(?:\\.|[^"\\\n])*"?'
    r"|'(?:\\.|[^'\\\n])*'?",
    re.DOTALL,
)
_TOKEN = re.compile(r"[A-Za-z_$][\w$]*|\d[\w.]*|\S")
_PACKAGE = re.compile(r"^\s*package\s+([\w$.]+)\s*;", re.MULTILINE)
_IMPORT = re.compile(r"^\s*import\s+(?:static\s+)?([\w$.]+(?:\s*\.\s*\*)?)\s*;", re.MULTILINE)

_TYPE_KEYWORDS = {"class", "interface", "enum"}
_NOT_A_METHOD = {
    "if", "for", "while", "switch", "catch", "synchronized", "return", "new", "throw",
    "super", "this", "else", "try", "do", "assert", "case", "default",
}
_BEFORE_DECL_REJECT = {".", "=", "new", "@", "return", "throw", "(", ",", "?", ":", "!", "+", "-"}


@dataclass(frozen=True)
class FileStructure:
    path: str
    file_name: str
    base_name: str
    package: str = ""
    classes: tuple = ()
    methods: tuple = ()
    imports: tuple = ()


def strip_comments_and_literals(source: str) -> str:
    """Blank out comments and string/char literals, keeping line breaks."""
    return _NOISE.sub(lambda m: re.sub(r"[^\n]", " ", m.group(0)), source)


def _is_identifier(tok):
    return bool(tok) and (tok[0].isalpha() or tok[0] in "_$")


def _matching(tokens, start, open_tok, close_tok):
    """Index of the token closing the group opened at ``start`` (or len(tokens))."""
    depth = 0
    for j in range(start, len(tokens)):
        if tokens[j] == open_tok:
            depth += 1
        elif tokens[j] == close_tok:
            depth -= 1
            if depth == 0:
                return j
    return len(tokens)


def _anonymous_bodies(tokens):
    """Token indices of '{' that open an anonymous class body (``new T(...) {``)."""
    bodies = set()
    for i, tok in enumerate(tokens):
        if tok != "new":
            continue
        j = i + 1
        angle = 0
        while j < len(tokens):
            t = tokens[j]
            if t == "<":
                angle += 1
            elif t == ">":
                angle -= 1
            elif angle == 0 and not (_is_identifier(t) or t == "."):
                break
            j += 1
        if j < len(tokens) and tokens[j] == "(":
            close = _matching(tokens, j, "(", ")")
            if close + 1 < len(tokens) and tokens[close + 1] == "{":
                bodies.add(close + 1)
    return bodies


def _dedupe(items):
    return tuple(dict.fromkeys(items))


def parse_source(path: str, content: str) -> FileStructure:
    path = path.replace("\\", "/").lstrip("/")
    file_name = path.rsplit("/", 1)[-1]
    base_name = file_name[:-5] if file_name.endswith(".java") else file_name
    code = strip_comments_and_literals(content or "")

    pkg = _PACKAGE.search(code)
    imports = [re.sub(r"\s+", "", m.group(1)) for m in _IMPORT.finditer(code)]

    tokens = _TOKEN.findall(code)
    anonymous = _anonymous_bodies(tokens)
    classes, methods = [], []
    stack = []  # "type" or "block" per open brace
    type_names = []  # enclosing type name per "type" entry (None for anonymous)
    pending_type = None
    i, n = 0, len(tokens)
    while i < n:
        tok = tokens[i]
        prev = tokens[i - 1] if i else ""
        if tok in _TYPE_KEYWORDS and prev != "." and i + 1 < n and _is_identifier(tokens[i + 1]):
            name = tokens[i + 1]
            if "type" not in stack:
                # Top-level type: drop depth bookkeeping left by malformed code.
                stack.clear()
                type_names.clear()
            classes.append(name)
            pending_type = name
            i += 2
            continue
        if tok == "{":
            if pending_type is not None:
                stack.append("type")
                type_names.append(pending_type)
                pending_type = None
            elif i in anonymous:
                stack.append("type")
                type_names.append(None)
            else:
                stack.append("block")
            i += 1
            continue
        if tok == "}":
            if stack:
                if stack.pop() == "type":
                    type_names.pop()
            i += 1
            continue
        if (
            stack
            and stack[-1] == "type"
            and _is_identifier(tok)
            and tok not in _NOT_A_METHOD
            and i + 1 < n
            and tokens[i + 1] == "("
            and prev not in _BEFORE_DECL_REJECT
        ):
            close = _matching(tokens, i + 1, "(", ")")
            j = close + 1
            if j < n and tokens[j] == "throws":
                j += 1
                while j < n and (_is_identifier(tokens[j]) or tokens[j] in {".", ",", "<", ">"}):
                    j += 1
            terminator = tokens[j] if j < n else ""
            enclosing = type_names[-1] if type_names else None
            is_ctor = tok == enclosing
            typed = _is_identifier(prev) or prev in {">", "]"}
            if terminator == "{" and (typed or is_ctor):
                methods.append(tok)
                i = j
                continue
            if terminator in {";", "default"} and typed and prev not in _TYPE_KEYWORDS:
                methods.append(tok)
                i = j
                continue
        i += 1

    return FileStructure(
        path=path,
        file_name=file_name,
        base_name=base_name,
        package=pkg.group(1) if pkg else "",
        classes=_dedupe(classes),
        methods=_dedupe(methods),
        imports=_dedupe(imports),
    )


def parse_structure(file) -> FileStructure:
    """Structure of a SnapshotFile (anything with ``path`` and ``content``)."""
    return parse_source(file.path, file.content)
