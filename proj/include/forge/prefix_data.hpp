#pragma once

// Generated by tools/gen_prefix_header.py from data/nonbreaking_prefixes/. Do not edit.

namespace forge::prefix_data {

inline constexpr const char* kEnglish = R"PFX(# Non-breaking prefixes for English, Moses format.
# A trailing #NUMERIC_ONLY# marks prefixes that only block a break before a number.
# Single uppercase letters (initials)
A
B
C
D
E
F
G
H
I
J
K
L
M
N
O
P
Q
R
S
T
U
V
W
X
Y
Z
# Honorifics and titles
Adj
Adm
Adv
Asst
Bart
Bldg
Brig
Bros
Capt
Cmdr
Col
Comdr
Con
Corp
Cpl
DR
Dr
Drs
Ens
Gen
Gov
Hon
Hr
Hosp
Insp
Lt
MM
MR
MRS
MS
Maj
Messrs
Mlle
Mme
Mr
Mrs
Ms
Msgr
Op
Ord
Pfc
Ph
Prof
Pvt
Rep
Reps
Res
Rev
Rt
Sen
Sens
Sfc
Sgt
Shri
Smt
Sr
St
Supt
Surg
Kum
Sh
# Miscellaneous
v
vs
i.e
rev
e.g
Govt
Dept
Jr
Ltd
Co
Inc
Pvt
Mt
Fig
Ch
Vol
Sec
Est
approx
# Months
Jan
Feb
Mar
Apr
Jun
Jul
Aug
Sep
Sept
Oct
Nov
Dec
# Numbers only
No #NUMERIC_ONLY#
Art #NUMERIC_ONLY#
pp #NUMERIC_ONLY#
Nos #NUMERIC_ONLY#
Rs #NUMERIC_ONLY#
)PFX";

inline constexpr const char* kIndic = R"PFX(# Pan-Indic non-breaking prefixes, Moses format.
# Single letters in each script are handled by the splitter's single-letter
# rule; this list covers honorifics and common abbreviations.
# Devanagari (hi, mr)
डॉ
प्रो
श्री
श्रीमती
सुश्री
कु
मि
सं
# Bengali script (bn, as, mni)
ডঃ
ডা
প্রো
শ্রী
শ্রীমতী
# Gurmukhi (pa)
ਡਾ
ਪ੍ਰੋ
ਸ੍ਰੀ
# Gujarati (gu)
ડૉ
પ્રો
શ્રી
# Oriya (or)
ଡ଼
ପ୍ରୋ
ଶ୍ରୀ
# Tamil (ta)
டாக்டர்
திரு
திருமதி
பேரா
# Telugu (te)
డా
ప్రొ
శ్రీ
# Kannada (kn)
ಡಾ
ಪ್ರೊ
ಶ್ರೀ
# Malayalam (ml)
ഡോ
പ്രൊ
ശ്രീ
# Latin-script abbreviations that occur in mixed text
Mr
Mrs
Ms
Dr
Prof
Shri
Smt
St
No #NUMERIC_ONLY#
Rs #NUMERIC_ONLY#
)PFX";

}  // namespace forge::prefix_data
