# word_syntax.py
#
# Letters of the alphabet {b, b^-1, t, t^-1}. Upper case is the inverse.

B = "b"
B_INV = "B"
T = "t"
T_INV = "T"

LETTERS = (B, B_INV, T, T_INV)

INVERSE_LETTER = {
    B: B_INV,
    B_INV: B,
    T: T_INV,
    T_INV: T,
}

# Extra spellings accepted by the text parser
LETTER_ALIASES = {
    "b⁻¹": B_INV,
    "t⁻¹": T_INV,
    "b'": B_INV,
    "t'": T_INV,
}

IDENTITY_TEXT = "identity"
INFINITY_TEXT = "inf"
