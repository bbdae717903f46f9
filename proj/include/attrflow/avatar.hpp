#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "attrflow/image.hpp"
#include "attrflow/rng.hpp"

namespace attrflow {

// The three prompt-able visual attributes, in fixed merge order.
enum class AttributeKind : int { Face = 0, Hair = 1, Clothing = 2 };
inline constexpr int kAttributeCount = 3;
inline constexpr std::array<AttributeKind, 3> kAllAttributes = {
    AttributeKind::Face, AttributeKind::Hair, AttributeKind::Clothing};

enum class Pose : int { Left = 0, Center = 1, Right = 2 };
enum class Expression : int { Neutral = 0, Smile = 1 };
enum class HairStyle : int { Cap = 0, Spiky = 1, Long = 2 };
enum class ClothingPattern : int { Solid = 0, Stripes = 1, Checker = 2 };

inline constexpr int kPaletteSize = 8;
inline constexpr int kPoseCount = 3;
inline constexpr int kExpressionCount = 2;
inline constexpr int kEyeMarkerCount = 4;
inline constexpr int kHairStyleCount = 3;
inline constexpr int kClothingPatternCount = 3;

inline constexpr int kCanvas = 64;
inline constexpr int kCropSize = 32;

// Scene controls: the discrete "text prompt" of the generator.
struct TextCondition {
    Pose pose = Pose::Center;
    Expression expression = Expression::Neutral;
    int background = 0;  // palette index 0..7

    bool operator==(const TextCondition&) const = default;
};

// Appearance; fully determines the render given a TextCondition.
struct AvatarIdentity {
    int face_color = 0;  // palette 0..7
    int eye_marker = 0;  // pattern 0..3, the "identity" mark
    int hair_color = 0;
    HairStyle hair_style = HairStyle::Cap;
    int clothing_color = 0;
    ClothingPattern clothing_pattern = ClothingPattern::Solid;

    bool operator==(const AvatarIdentity&) const = default;
};

inline constexpr int kIdentitySpace = 8 * 4 * 8 * 3 * 8 * 3;  // 18432
inline constexpr int kConditionSpace = 3 * 2 * 8;             // 48

int identity_index(const AvatarIdentity& id);
AvatarIdentity identity_from_index(int idx);
int condition_index(const TextCondition& c);
TextCondition condition_from_index(int idx);

struct CropBox {
    int x0 = 0, y0 = 0, w = 0, h = 0;
};

struct RenderedSample {
    Image image;  // 3 x 64 x 64
    AvatarIdentity identity;
    TextCondition condition;
    std::array<CropBox, kAttributeCount> crop_boxes;
};

// Deterministic hard-edged render; no anti-aliasing, so every region is an
// exact palette color (or pure black for markers/outlines/patterns).
RenderedSample render_avatar(const AvatarIdentity& id, const TextCondition& cond);

// Pixel rectangle per crop_boxes, resized to 32x32 (boxes are 32x32, so
// this is exact extraction).
Image crop_attribute(const RenderedSample& sample, AttributeKind kind);

CropBox attribute_crop_box(AttributeKind kind, Pose pose);

struct FieldEstimate {
    int value = 0;
    double confidence = 0.0;
};

// analyze() output: nearest-vocabulary estimates plus per-field confidence.
struct AnalysisResult {
    FieldEstimate face_color, eye_marker, hair_color, hair_style, clothing_color,
        clothing_pattern;
    FieldEstimate pose, expression, background;

    AvatarIdentity identity() const {
        return {face_color.value, eye_marker.value, hair_color.value,
                static_cast<HairStyle>(hair_style.value), clothing_color.value,
                static_cast<ClothingPattern>(clothing_pattern.value)};
    }
    TextCondition condition() const {
        return {static_cast<Pose>(pose.value), static_cast<Expression>(expression.value),
                background.value};
    }
    double min_confidence() const;
};

// Exact inverse of render_avatar on clean renders (all confidences 1.0);
// nearest-entry estimates with graded confidence on anything else. Never
// throws: generated images may be arbitrarily degenerate.
AnalysisResult analyze(const Image& img);

const std::array<std::array<uint8_t, 3>, kPaletteSize>& palette();

// uniform draws
AvatarIdentity random_identity(Rng& rng);
TextCondition random_condition(Rng& rng);

const char* pose_name(Pose p);
const char* expression_name(Expression e);
const char* hair_style_name(HairStyle h);
const char* clothing_pattern_name(ClothingPattern p);
const char* attribute_name(AttributeKind k);
Pose parse_pose(const std::string& s);
Expression parse_expression(const std::string& s);
HairStyle parse_hair_style(const std::string& s);
ClothingPattern parse_clothing_pattern(const std::string& s);

}  // namespace attrflow
