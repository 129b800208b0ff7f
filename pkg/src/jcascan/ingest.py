"""Locate crypto-API invocation sites in parsed Java source.

Two invocation families are extracted:

* restrictive — call sites whose arguments select an algorithm, i.e.
  ``Cipher.getInstance(...)`` and ``new SecretKeySpec(...)``. The analysis
  subtree is the argument list.
* flexible — method bodies that implement a security decision, i.e.
  ``checkServerTrusted(X509Certificate[], String)`` and the
  ``HostnameVerifier`` ``verify(String, SSLSession)``. The analysis subtree
  is the body block.

Matching is name-based (callee named ``getInstance`` on a receiver whose
text mentions ``Cipher``, etc.): decompiled code lacks reliable type
information, so lookalike receivers are accepted here and triaged later by
the classifier.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path

from .javaparse import parse_unit
from .syntax import ParseWarning, SourceUnit, SyntaxNode

RESTRICTIVE = "restrictive"
FLEXIBLE = "flexible"


@dataclass(frozen=True)
class ApiKind:
    """A target API signature and its invocation category."""

    name: str
    category: str  # RESTRICTIVE or FLEXIBLE

    def __str__(self) -> str:
        return self.name


RESTRICTIVE_CIPHER_GETINSTANCE = ApiKind("RESTRICTIVE_CIPHER_GETINSTANCE",
                                         RESTRICTIVE)
RESTRICTIVE_SECRETKEYSPEC = ApiKind("RESTRICTIVE_SECRETKEYSPEC", RESTRICTIVE)
FLEXIBLE_CHECK_SERVER_TRUSTED = ApiKind("FLEXIBLE_CHECK_SERVER_TRUSTED",
                                        FLEXIBLE)
FLEXIBLE_HOSTNAME_VERIFIER = ApiKind("FLEXIBLE_HOSTNAME_VERIFIER", FLEXIBLE)

DEFAULT_APIS = frozenset({
    RESTRICTIVE_CIPHER_GETINSTANCE,
    RESTRICTIVE_SECRETKEYSPEC,
    FLEXIBLE_CHECK_SERVER_TRUSTED,
    FLEXIBLE_HOSTNAME_VERIFIER,
})


@dataclass(frozen=True)
class CustomApi:
    """An extra API signature from a scan config file.

    ``Class.method`` form matches restrictive call sites; ``name(arity)``
    form matches flexible method declarations.
    """

    kind: ApiKind
    receiver: str | None = None   # restrictive: receiver substring
    method: str | None = None     # restrictive callee / flexible name
    arity: int | None = None      # flexible parameter count


@dataclass
class InvocationSite:
    """One occurrence of a target API in one file."""

    id: str
    api: ApiKind
    subtree: SyntaxNode          # argument_list / block / no_body marker
    enclosing_class: str
    enclosing_method: str | None
    context: list[SyntaxNode] = field(default_factory=list)
    unit: SourceUnit | None = None
    node: SyntaxNode | None = None       # the invocation / declaration node
    receiver_text: str = ""              # restrictive receiver, e.g. "Cipher"
    start_line: int = 0
    end_line: int = 0

    @property
    def path(self) -> str:
        return self.unit.path if self.unit else self.id.rsplit(":", 1)[0]


def parse_config(text: str) -> list[CustomApi]:
    """Parse `api = <Class.method | name(arity)>` lines into matchers."""
    extras: list[CustomApi] = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, _, value = line.partition("=")
        if key.strip() != "api" or not value.strip():
            continue
        value = value.strip()
        m = re.fullmatch(r"(\w+)\((\d+)\)", value)
        if m:
            kind = ApiKind(f"FLEXIBLE_{m.group(1).upper()}", FLEXIBLE)
            extras.append(CustomApi(kind, method=m.group(1),
                                    arity=int(m.group(2))))
            continue
        if "." in value:
            receiver, method = value.rsplit(".", 1)
            kind = ApiKind(
                f"RESTRICTIVE_{receiver.upper()}_{method.upper()}",
                RESTRICTIVE)
            extras.append(CustomApi(kind, receiver=receiver, method=method))
    return extras


def load_config(path: str | Path) -> list[CustomApi]:
    return parse_config(Path(path).read_text(encoding="utf-8"))


def _line_of(text: str, offset: int) -> int:
    return text.count("\n", 0, offset) + 1


def _no_body_marker(decl: SyntaxNode) -> SyntaxNode:
    return SyntaxNode("no_body", decl.end, decl.end, [], None, decl.source)


def _method_parts(decl: SyntaxNode) -> tuple[str | None, SyntaxNode | None,
                                             SyntaxNode | None,
                                             tuple[str, ...]]:
    """(name, formal_parameters, body block or None, modifier words)."""
    name = None
    params = None
    body = None
    mods: tuple[str, ...] = ()
    for child in decl.children:
        if child.kind == "modifiers" and isinstance(child.value, tuple):
            mods = child.value
        elif child.kind == "identifier" and name is None:
            name = child.value
        elif child.kind == "formal_parameters":
            params = child
        elif child.kind == "block":
            body = child
    return name, params, body, mods


def _param_types(params: SyntaxNode | None) -> list[str]:
    if params is None:
        return []
    out = []
    for p in params.children:
        if p.kind == "formal_parameter" and p.children:
            out.append(str(p.children[0].value or ""))
    return out


def _is_cert_array(type_text: str) -> bool:
    return "Certificate" in type_text and type_text.endswith("[]")


def _class_stack(root: SyntaxNode) -> list[tuple[SyntaxNode, str, SyntaxNode]]:
    """All (type declaration, name, body) triples in the unit, any nesting."""
    out = []
    for node in root.walk():
        if node.kind in ("class_declaration", "interface_declaration",
                         "enum_declaration"):
            name = next((c.value for c in node.children
                         if c.kind == "identifier"), "?")
            body = next((c for c in node.children
                         if c.kind in ("class_body", "enum_body")), None)
            if body is not None:
                out.append((node, str(name), body))
    return out


def extract_sites(unit: SourceUnit,
                  apis: frozenset[ApiKind] | set[ApiKind] = DEFAULT_APIS,
                  extras: list[CustomApi] | None = None
                  ) -> list[InvocationSite]:
    """All invocation sites in one parsed unit, ordered by byte offset."""
    if unit.parse_failed:
        return []
    extras = extras or []
    sites: list[InvocationSite] = []
    classes = _class_stack(unit.root)

    def enclosing(node: SyntaxNode) -> tuple[str, str | None, list[SyntaxNode]]:
        cls_name, ctx = "?", []
        best_span = None
        for _, name, body in classes:
            if body.start <= node.start and node.end <= body.end:
                span = body.end - body.start
                if best_span is None or span < best_span:
                    best_span = span
                    cls_name, ctx = name, body.children
        method = None
        best_m = None
        for _, _, body in classes:
            for member in body.children:
                if member.kind in ("method_declaration",
                                   "constructor_declaration") \
                        and member.start <= node.start <= member.end:
                    span = member.end - member.start
                    if best_m is None or span < best_m:
                        best_m = span
                        method, _, _, _ = _method_parts(member)
        return cls_name, method, ctx

    def add(api: ApiKind, node: SyntaxNode, subtree: SyntaxNode,
            receiver: str = "") -> None:
        cls_name, method, ctx = enclosing(node)
        sites.append(InvocationSite(
            id=f"{unit.path}:{node.start}",
            api=api,
            subtree=subtree,
            enclosing_class=cls_name,
            enclosing_method=method,
            context=ctx,
            unit=unit,
            node=node,
            receiver_text=receiver,
            start_line=_line_of(unit.text, node.start),
            end_line=_line_of(unit.text, max(node.start, node.end - 1)),
        ))

    want_cipher = RESTRICTIVE_CIPHER_GETINSTANCE in apis
    want_keyspec = RESTRICTIVE_SECRETKEYSPEC in apis
    want_cst = FLEXIBLE_CHECK_SERVER_TRUSTED in apis
    want_hv = FLEXIBLE_HOSTNAME_VERIFIER in apis

    for node in unit.root.walk():
        if node.kind == "method_invocation":
            args = node.children[-1]
            name = node.value
            if len(node.children) == 3:
                receiver = node.children[0].text
            else:
                receiver = ""
            if want_cipher and name == "getInstance" and "Cipher" in receiver:
                add(RESTRICTIVE_CIPHER_GETINSTANCE, node, args, receiver)
                continue
            for extra in extras:
                if extra.kind.category == RESTRICTIVE \
                        and name == extra.method \
                        and extra.receiver and extra.receiver in receiver:
                    add(extra.kind, node, args, receiver)
                    break
        elif node.kind == "object_creation_expression":
            type_node = node.children[0]
            args = next((c for c in node.children
                         if c.kind == "argument_list"), None)
            if want_keyspec and args is not None \
                    and "SecretKeySpec" in str(type_node.value or ""):
                add(RESTRICTIVE_SECRETKEYSPEC, node, args,
                    str(type_node.value))
        elif node.kind == "method_declaration":
            name, params, body, mods = _method_parts(node)
            types = _param_types(params)
            subtree = body if body is not None else _no_body_marker(node)
            if want_cst and name == "checkServerTrusted":
                add(FLEXIBLE_CHECK_SERVER_TRUSTED, node, subtree)
                continue
            if want_hv and name == "verify" and len(types) == 2 \
                    and types[0] == "String" and "SSLSession" in types[1]:
                add(FLEXIBLE_HOSTNAME_VERIFIER, node, subtree)
                continue
            for extra in extras:
                if extra.kind.category == FLEXIBLE and name == extra.method \
                        and (extra.arity is None or len(types) == extra.arity):
                    add(extra.kind, node, subtree)
                    break

    sites.sort(key=lambda s: (s.unit.path, s.node.start))
    return sites


def scan_corpus(root_dir: str | Path,
                apis: frozenset[ApiKind] | set[ApiKind] = DEFAULT_APIS,
                extras: list[CustomApi] | None = None
                ) -> tuple[list[InvocationSite], list[ParseWarning]]:
    """Recursively scan ``*.java`` under root_dir.

    Deterministic: files visited in sorted path order, sites sorted by
    (path, offset). Per-file failures become warnings, never aborts.
    """
    root = Path(root_dir)
    if not root.is_dir():
        raise FileNotFoundError(f"corpus directory not found: {root}")
    sites: list[InvocationSite] = []
    warnings: list[ParseWarning] = []
    for path in sorted(root.rglob("*.java")):
        try:
            text = path.read_text(encoding="utf-8", errors="replace")
        except OSError as exc:
            warnings.append(ParseWarning(str(path), 0, f"unreadable: {exc}"))
            continue
        unit = parse_unit(str(path), text)
        if unit.parse_failed:
            warnings.append(ParseWarning(str(path), 0, "PARSE_FAILED"))
            continue
        warnings.extend(unit.warnings)
        sites.extend(extract_sites(unit, apis, extras))
    sites.sort(key=lambda s: (s.path, s.node.start if s.node else 0))
    return sites, warnings
