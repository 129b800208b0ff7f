"""String-value resolution: oracle fixtures, residuals, budgets,
and soundness against an independent brute-force evaluator."""

from __future__ import annotations

import string

from hypothesis import given, settings, strategies as st

from jcascan.javaparse import parse_unit
from jcascan.ingest import extract_sites
from jcascan.resolve import (DEPTH_EXCEEDED, EXTERNAL_INPUT, NATIVE,
                             NETWORK, UNKNOWN, ResolutionBudget,
                             has_encrypted_param_pattern, resolve_site,
                             visible_literals)

from conftest import (BASE64_SRC, BYTE_LOOP_SRC, CHARAT_SRC,
                      ENCRYPTED_PARAM_SRC, ENUM_SRC, KEY_BASE64_SRC,
                      KEY_LITERAL_SRC, NATIVE_SRC, NESTED_TERNARY_SRC,
                      REPLACE_SRC, STRINGBUFFER_SRC, STRINGBUILDER_SRC,
                      TERNARY_SRC, XOR_SRC, site_of)


def resolve_src(src: str):
    return resolve_site(site_of(src))


class TestOracleFixtures:
    """Each fixture's candidate set was cross-checked by evaluating the
    same Java expressions by hand / with an independent interpreter."""

    def test_charat_build(self):
        r = resolve_src(CHARAT_SRC)
        assert r.candidates == {"AES/ECB/NoPadding"}
        assert not r.residuals

    def test_xor_decode(self):
        r = resolve_src(XOR_SRC)
        assert r.candidates == {"AES/ECB/PKCS5Padding"}
        assert not r.residuals

    def test_base64_direct(self):
        r = resolve_src(BASE64_SRC)
        assert r.candidates == {"DES/CBC/PKCS5Padding"}

    def test_byte_array_loop(self):
        r = resolve_src(BYTE_LOOP_SRC)
        assert r.candidates == {"AES"}

    def test_ternary_union(self):
        r = resolve_src(TERNARY_SRC)
        assert r.candidates == {"AES/GCM/NoPadding", "AES"}

    def test_stringbuffer(self):
        r = resolve_src(STRINGBUFFER_SRC)
        assert r.candidates == {"DESede/CBC/NoPadding"}

    def test_stringbuilder_fragments(self):
        r = resolve_src(STRINGBUILDER_SRC)
        assert r.candidates == {"AES/ECB/PKCS7Padding"}

    def test_nested_ternary(self):
        r = resolve_src(NESTED_TERNARY_SRC)
        assert r.candidates == {"RSA/ECB/OAEPWithSHA-1AndMGF1Padding",
                                "RSA/ECB/PKCS1Padding"}

    def test_replace(self):
        r = resolve_src(REPLACE_SRC)
        assert r.candidates == {"DES"}

    def test_enum_constant_payload(self):
        r = resolve_src(ENUM_SRC)
        assert r.candidates == {"DES/ECB/PKCS5Padding"}

    def test_native_residual(self):
        r = resolve_src(NATIVE_SRC)
        assert r.candidates == set()
        assert NATIVE in r.residuals

    def test_key_literal_bytes(self):
        r = resolve_src(KEY_LITERAL_SRC)
        assert any(isinstance(v, bytes)
                   and v == b"oejkdirztefhnvscxhdmdzedfotuabje"
                   for v in r.raw_candidates)

    def test_key_base64_bytes(self):
        r = resolve_src(KEY_BASE64_SRC)
        raw = [v for v in r.raw_candidates if isinstance(v, bytes)]
        assert raw and len(raw[0]) == 64


class TestResiduals:
    def test_external_input_param(self):
        src = ('import javax.crypto.Cipher;\n'
               'class A { void m(String t) throws Exception {'
               ' Cipher.getInstance(t); } }')
        r = resolve_site(site_of(src))
        assert not r.candidates
        assert EXTERNAL_INPUT in r.residuals

    def test_network_source(self):
        src = ('import javax.crypto.Cipher;\n'
               'class A { void m(java.net.HttpURLConnection c)'
               ' throws Exception {'
               ' Cipher.getInstance(c.getHeaderField("algo")); } }')
        r = resolve_site(site_of(src))
        assert NETWORK in r.residuals

    def test_unknown_call(self):
        src = ('import javax.crypto.Cipher;\n'
               'class A { void m() throws Exception {'
               ' Cipher.getInstance(Other.lookup()); } }')
        r = resolve_site(site_of(src))
        assert not r.candidates
        assert r.residuals  # some residual explains the missing value

    def test_candidate_cap(self):
        # 2^5 = 32 combinations exceeds the 16-candidate budget
        parts = " + ".join(f'(b{i} ? "a{i}" : "b{i}")' for i in range(5))
        src = ('import javax.crypto.Cipher;\n'
               'class A { void m(boolean b0, boolean b1, boolean b2,'
               ' boolean b3, boolean b4) throws Exception {'
               f' Cipher.getInstance({parts}); }} }}')
        r = resolve_site(site_of(src))
        assert len(r.candidates) <= 16
        assert DEPTH_EXCEEDED in r.residuals

    def test_indirection_budget(self):
        hops = "".join(
            f'static String h{i}() {{ return h{i + 1}(); }}\n'
            for i in range(12)) + 'static String h12() { return "DES"; }\n'
        src = ('import javax.crypto.Cipher;\n'
               f'class A {{ {hops} void m() throws Exception {{'
               ' Cipher.getInstance(h0()); } }')
        r = resolve_site(site_of(src),
                         ResolutionBudget(max_indirection=2,
                                          max_call_depth=2))
        assert "DES" not in r.candidates
        assert DEPTH_EXCEEDED in r.residuals


class TestVisibility:
    def test_charat_value_not_visible(self):
        site = site_of(CHARAT_SRC)
        r = resolve_site(site)
        lits = visible_literals(site, r)
        assert "AES/ECB/NoPadding" not in lits
        assert "AES/GCM/NoPadding" in lits

    def test_plain_literal_visible(self):
        src = ('import javax.crypto.Cipher;\n'
               'class A { void m() throws Exception {'
               ' Cipher.getInstance("DES"); } }')
        site = site_of(src)
        r = resolve_site(site)
        assert "DES" in visible_literals(site, r)

    def test_encrypted_param_pattern(self):
        assert has_encrypted_param_pattern(site_of(ENCRYPTED_PARAM_SRC))

    def test_no_encrypted_pattern_on_plain_call(self):
        src = ('import javax.crypto.Cipher;\n'
               'class A { void m() throws Exception {'
               ' Cipher.getInstance(Config.algo()); } }')
        assert not has_encrypted_param_pattern(site_of(src))


_word = st.text(alphabet=string.ascii_letters + "/", min_size=0,
                max_size=8)


class TestProperties:
    @given(parts=st.lists(_word, min_size=1, max_size=4))
    @settings(max_examples=60, deadline=None)
    def test_concat_soundness(self, parts):
        """Concrete concatenations resolve to exactly the runtime value."""
        expr = " + ".join(f'"{p}"' for p in parts)
        src = ('import javax.crypto.Cipher;\n'
               'class A { void m() throws Exception {'
               f' Cipher.getInstance({expr}); }} }}')
        r = resolve_site(site_of(src))
        assert r.candidates == {"".join(parts)}
        assert not r.residuals

    @given(a=_word, b=_word)
    @settings(max_examples=60, deadline=None)
    def test_ternary_is_union(self, a, b):
        src = ('import javax.crypto.Cipher;\n'
               'class A { void m(boolean z) throws Exception {'
               f' Cipher.getInstance(z ? "{a}" : "{b}"); }} }}')
        r = resolve_site(site_of(src))
        assert r.candidates == {a, b}

    @given(text=st.text(alphabet=string.ascii_letters + "/",
                        min_size=1, max_size=12),
           start=st.integers(min_value=0, max_value=11))
    @settings(max_examples=60, deadline=None)
    def test_substring_soundness(self, text, start):
        if start >= len(text):
            return
        src = ('import javax.crypto.Cipher;\n'
               'class A { void m() throws Exception {'
               f' Cipher.getInstance("{text}".substring({start})); }} }}')
        r = resolve_site(site_of(src))
        assert r.candidates == {text[start:]}


class TestTrace:
    def test_trace_names_rules(self):
        r = resolve_src(STRINGBUFFER_SRC)
        rules = {step.rule for step in r.trace}
        assert rules  # at least one named rule
        assert all(isinstance(step.rule, str) and step.rule
                   for step in r.trace)

    def test_base64_trace_step(self):
        r = resolve_src(BASE64_SRC)
        assert any(step.rule == "base64-decode" for step in r.trace)
