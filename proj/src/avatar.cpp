#include "attrflow/avatar.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <utility>
#include <vector>

namespace attrflow {

namespace {

// ---- analytic layout, shared by the renderer and the analyzer ----------

constexpr int kFaceCy = 24;
constexpr int kFaceR2 = 144;  // radius 12
constexpr int kHairR2 = 169;  // radius 13
constexpr int kClothTop = 40, kClothBottom = 63, kClothLeft = 10, kClothRight = 53;
constexpr int kBandTop = 6, kBandBottom = 39;  // rows holding all face/hair marks

int pose_shift(Pose p) {
    switch (p) {
        case Pose::Left: return -6;
        case Pose::Center: return 0;
        case Pose::Right: return 6;
    }
    return 0;
}

int face_cx(Pose p) { return kCanvas / 2 + pose_shift(p); }
int eye_offset(Pose p) { return pose_shift(p) / 3; }

using PixelSet = std::set<std::pair<int, int>>;  // (x, y), ordered for determinism

// eye-marker pixel offsets around each eye center; four distinct shapes
const std::vector<std::pair<int, int>>& marker_offsets(int marker) {
    static const std::vector<std::vector<std::pair<int, int>>> shapes = {
        {{0, 0}, {1, 0}, {0, 1}, {1, 1}},              // square
        {{-1, 0}, {0, 0}, {1, 0}},                     // horizontal bar
        {{0, -1}, {0, 0}, {0, 1}},                     // vertical bar
        {{-1, -1}, {1, -1}, {0, 0}, {-1, 1}, {1, 1}},  // cross
    };
    return shapes[static_cast<size_t>(marker)];
}

PixelSet eye_pixels(int marker, Pose pose) {
    const int cx = face_cx(pose), e = eye_offset(pose);
    PixelSet px;
    for (int side : {-4, 4})
        for (auto [dx, dy] : marker_offsets(marker))
            px.insert({cx + e + side + dx, kFaceCy - 4 + dy});
    return px;
}

PixelSet mouth_pixels(Expression expr, Pose pose) {
    const int mx = face_cx(pose) + eye_offset(pose);
    const int my = kFaceCy + 6;
    PixelSet px;
    if (expr == Expression::Neutral) {
        for (int dx = -3; dx <= 2; ++dx) px.insert({mx + dx, my});
    } else {
        px.insert({mx - 3, my - 1});
        px.insert({mx + 2, my - 1});
        for (int dx = -2; dx <= 1; ++dx) px.insert({mx + dx, my});
    }
    return px;
}

bool in_hair_region(HairStyle style, int cx, int x, int y) {
    const int dx = x - cx, dy = y - kFaceCy;
    const bool cap = dx * dx + dy * dy <= kHairR2 && dy <= -7;
    if (cap) return true;
    if (style == HairStyle::Spiky) {
        if (y >= kFaceCy - 16 && y <= kFaceCy - 12)
            for (int a : {-10, -5, 0, 5, 10})
                if (std::abs(dx - a) <= 1) return true;
    } else if (style == HairStyle::Long) {
        if (y >= kFaceCy - 4 && y <= kFaceCy + 10)
            if (std::abs(dx) >= 13 && std::abs(dx) <= 15) return true;
    }
    return false;
}

// inner boundary of the hair region, drawn black
PixelSet hair_outline(HairStyle style, Pose pose) {
    const int cx = face_cx(pose);
    PixelSet px;
    for (int y = 0; y < kCanvas; ++y)
        for (int x = 0; x < kCanvas; ++x) {
            if (!in_hair_region(style, cx, x, y)) continue;
            const bool edge = !in_hair_region(style, cx, x - 1, y) ||
                              !in_hair_region(style, cx, x + 1, y) ||
                              !in_hair_region(style, cx, x, y - 1) ||
                              !in_hair_region(style, cx, x, y + 1);
            if (edge) px.insert({x, y});
        }
    return px;
}

bool clothing_black(ClothingPattern pattern, int shift, int x, int y) {
    // +24 keeps the phase argument positive without changing it mod 8
    const int u = x - kClothLeft + shift + 24;
    const int v = y - kClothTop;
    switch (pattern) {
        case ClothingPattern::Solid: return false;
        case ClothingPattern::Stripes: return (u % 8) >= 4;
        case ClothingPattern::Checker: return ((u / 4) + (v / 4)) % 2 == 1;
    }
    return false;
}

PixelSet clothing_black_pixels(ClothingPattern pattern, Pose pose) {
    const int s = pose_shift(pose);
    PixelSet px;
    for (int y = kClothTop; y <= kClothBottom; ++y)
        for (int x = kClothLeft; x <= kClothRight; ++x)
            if (clothing_black(pattern, s, x, y)) px.insert({x, y});
    return px;
}

bool in_face_disc(int cx, int x, int y) {
    const int dx = x - cx, dy = y - kFaceCy;
    return dx * dx + dy * dy <= kFaceR2;
}

struct Zone {
    int x0, x1, y0, y1;  // inclusive
    bool contains(int x, int y) const { return x >= x0 && x <= x1 && y >= y0 && y <= y1; }
    int area() const { return (x1 - x0 + 1) * (y1 - y0 + 1); }
};

Zone eye_zone(Pose p) {
    const int cx = face_cx(p);
    return {cx - 8, cx + 8, kFaceCy - 6, kFaceCy - 2};
}
Zone mouth_zone(Pose p) {
    const int cx = face_cx(p);
    return {cx - 7, cx + 6, kFaceCy + 3, kFaceCy + 8};
}

const std::array<std::array<uint8_t, 3>, kPaletteSize> kPalette = {{
    {220, 60, 60},    // red
    {70, 200, 80},    // green
    {70, 100, 220},   // blue
    {230, 220, 70},   // yellow
    {210, 70, 210},   // magenta
    {70, 210, 210},   // cyan
    {240, 150, 50},   // orange
    {235, 235, 235},  // white
}};

constexpr int kBlack = kPaletteSize;  // quantization index for pure/near black

void put_pixel(Image& img, int x, int y, int palette_or_black) {
    if (x < 0 || x >= kCanvas || y < 0 || y >= kCanvas) return;
    for (int c = 0; c < 3; ++c)
        img.at(c, y, x) =
            palette_or_black == kBlack
                ? 0.0f
                : static_cast<float>(kPalette[static_cast<size_t>(palette_or_black)][static_cast<size_t>(c)]) / 255.0f;
}

int quantize(const Image& img, int x, int y) {
    const float r = img.at(0, y, x) * 255.0f;
    const float g = img.at(1, y, x) * 255.0f;
    const float b = img.at(2, y, x) * 255.0f;
    int best = kBlack;
    float best_d = r * r + g * g + b * b;  // distance to black
    for (int i = 0; i < kPaletteSize; ++i) {
        const float dr = r - kPalette[static_cast<size_t>(i)][0];
        const float dg = g - kPalette[static_cast<size_t>(i)][1];
        const float db = b - kPalette[static_cast<size_t>(i)][2];
        const float d = dr * dr + dg * dg + db * db;
        if (d < best_d) {
            best_d = d;
            best = i;
        }
    }
    return best;
}

// similarity of an observed pixel set to a template over a window:
// 1 - |sym diff| / |window|
double mask_similarity(const PixelSet& observed, const PixelSet& expected, int window) {
    int sym = 0;
    for (const auto& p : observed) sym += expected.count(p) ? 0 : 1;
    for (const auto& p : expected) sym += observed.count(p) ? 0 : 1;
    return 1.0 - static_cast<double>(sym) / std::max(1, window);
}

FieldEstimate mode_color(const std::vector<int>& votes, int sample_size) {
    FieldEstimate est;
    int best = -1;
    for (int i = 0; i < kPaletteSize; ++i)
        if (votes[static_cast<size_t>(i)] > best) {
            best = votes[static_cast<size_t>(i)];
            est.value = i;
        }
    est.confidence = sample_size > 0 ? static_cast<double>(best) / sample_size : 0.0;
    return est;
}

}  // namespace

const std::array<std::array<uint8_t, 3>, kPaletteSize>& palette() { return kPalette; }

int identity_index(const AvatarIdentity& id) {
    int idx = id.face_color;
    idx = idx * kEyeMarkerCount + id.eye_marker;
    idx = idx * kPaletteSize + id.hair_color;
    idx = idx * kHairStyleCount + static_cast<int>(id.hair_style);
    idx = idx * kPaletteSize + id.clothing_color;
    idx = idx * kClothingPatternCount + static_cast<int>(id.clothing_pattern);
    return idx;
}

AvatarIdentity identity_from_index(int idx) {
    AvatarIdentity id;
    id.clothing_pattern = static_cast<ClothingPattern>(idx % kClothingPatternCount);
    idx /= kClothingPatternCount;
    id.clothing_color = idx % kPaletteSize;
    idx /= kPaletteSize;
    id.hair_style = static_cast<HairStyle>(idx % kHairStyleCount);
    idx /= kHairStyleCount;
    id.hair_color = idx % kPaletteSize;
    idx /= kPaletteSize;
    id.eye_marker = idx % kEyeMarkerCount;
    idx /= kEyeMarkerCount;
    id.face_color = idx % kPaletteSize;
    return id;
}

int condition_index(const TextCondition& c) {
    return (static_cast<int>(c.pose) * kExpressionCount + static_cast<int>(c.expression)) *
               kPaletteSize +
           c.background;
}

TextCondition condition_from_index(int idx) {
    TextCondition c;
    c.background = idx % kPaletteSize;
    idx /= kPaletteSize;
    c.expression = static_cast<Expression>(idx % kExpressionCount);
    idx /= kExpressionCount;
    c.pose = static_cast<Pose>(idx % kPoseCount);
    return c;
}

CropBox attribute_crop_box(AttributeKind kind, Pose pose) {
    const int cx = face_cx(pose);
    switch (kind) {
        case AttributeKind::Face: return {cx - 16, 8, kCropSize, kCropSize};
        case AttributeKind::Hair: return {cx - 16, 4, kCropSize, kCropSize};
        case AttributeKind::Clothing: return {16, 32, kCropSize, kCropSize};
    }
    return {};
}

RenderedSample render_avatar(const AvatarIdentity& id, const TextCondition& cond) {
    RenderedSample sample;
    sample.identity = id;
    sample.condition = cond;
    for (AttributeKind k : kAllAttributes)
        sample.crop_boxes[static_cast<size_t>(k)] = attribute_crop_box(k, cond.pose);

    Image& img = sample.image;
    img = Image(kCanvas, kCanvas);
    const int cx = face_cx(cond.pose);
    const int s = pose_shift(cond.pose);

    for (int y = 0; y < kCanvas; ++y)
        for (int x = 0; x < kCanvas; ++x) put_pixel(img, x, y, cond.background);

    for (int y = kClothTop; y <= kClothBottom; ++y)
        for (int x = kClothLeft; x <= kClothRight; ++x)
            put_pixel(img, x, y,
                      clothing_black(id.clothing_pattern, s, x, y) ? kBlack : id.clothing_color);

    for (int y = 0; y < kCanvas; ++y)
        for (int x = 0; x < kCanvas; ++x)
            if (in_face_disc(cx, x, y)) put_pixel(img, x, y, id.face_color);

    for (int y = 0; y < kCanvas; ++y)
        for (int x = 0; x < kCanvas; ++x)
            if (in_hair_region(id.hair_style, cx, x, y)) put_pixel(img, x, y, id.hair_color);
    for (const auto& [x, y] : hair_outline(id.hair_style, cond.pose)) put_pixel(img, x, y, kBlack);

    for (const auto& [x, y] : eye_pixels(id.eye_marker, cond.pose)) put_pixel(img, x, y, kBlack);
    for (const auto& [x, y] : mouth_pixels(cond.expression, cond.pose)) put_pixel(img, x, y, kBlack);

    return sample;
}

Image crop_attribute(const RenderedSample& sample, AttributeKind kind) {
    const CropBox box = sample.crop_boxes[static_cast<size_t>(kind)];
    Image crop(box.w, box.h);
    for (int c = 0; c < 3; ++c)
        for (int y = 0; y < box.h; ++y)
            for (int x = 0; x < box.w; ++x)
                crop.at(c, y, x) = sample.image.at(c, box.y0 + y, box.x0 + x);
    return resize_bilinear(crop, kCropSize, kCropSize);
}

double AnalysisResult::min_confidence() const {
    double m = 1.0;
    for (const auto* f : {&face_color, &eye_marker, &hair_color, &hair_style, &clothing_color,
                          &clothing_pattern, &pose, &expression, &background})
        m = std::min(m, f->confidence);
    return m;
}

AnalysisResult analyze(const Image& img) {
    if (img.width != kCanvas || img.height != kCanvas)
        throw std::invalid_argument("analyze: expected 64x64 image");

    std::vector<int> q(static_cast<size_t>(kCanvas) * kCanvas);
    for (int y = 0; y < kCanvas; ++y)
        for (int x = 0; x < kCanvas; ++x)
            q[static_cast<size_t>(y) * kCanvas + x] = quantize(img, x, y);
    auto qat = [&q](int x, int y) { return q[static_cast<size_t>(y) * kCanvas + x]; };
    auto in_cloth_rect = [](int x, int y) {
        return x >= kClothLeft && x <= kClothRight && y >= kClothTop && y <= kClothBottom;
    };

    AnalysisResult res;

    // background: border ring, excluding the clothing rectangle rows it cuts
    {
        std::vector<int> votes(kPaletteSize, 0);
        int sample = 0;
        for (int y = 0; y < kCanvas; ++y)
            for (int x = 0; x < kCanvas; ++x) {
                const bool border = x == 0 || x == kCanvas - 1 || y == 0 || y == kCanvas - 1;
                if (!border || in_cloth_rect(x, y)) continue;
                ++sample;
                if (qat(x, y) < kPaletteSize) ++votes[static_cast<size_t>(qat(x, y))];
            }
        res.background = mode_color(votes, sample);
    }

    // black marks in the face/hair band drive pose, style, marker, expression
    PixelSet band_black;
    for (int y = kBandTop; y <= kBandBottom; ++y)
        for (int x = 0; x < kCanvas; ++x)
            if (qat(x, y) == kBlack) band_black.insert({x, y});

    double best_hair_sim = -1.0;
    Pose best_pose = Pose::Center;
    HairStyle best_style = HairStyle::Cap;
    const int band_area = (kBandBottom - kBandTop + 1) * kCanvas;
    for (int pi = 0; pi < kPoseCount; ++pi) {
        const Pose p = static_cast<Pose>(pi);
        const Zone ze = eye_zone(p), zm = mouth_zone(p);
        PixelSet obs;
        for (const auto& [x, y] : band_black)
            if (!ze.contains(x, y) && !zm.contains(x, y)) obs.insert({x, y});
        const int window = band_area - ze.area() - zm.area();
        for (int hi = 0; hi < kHairStyleCount; ++hi) {
            const HairStyle h = static_cast<HairStyle>(hi);
            const double sim = mask_similarity(obs, hair_outline(h, p), window);
            if (sim > best_hair_sim) {
                best_hair_sim = sim;
                best_pose = p;
                best_style = h;
            }
        }
    }
    res.pose = {static_cast<int>(best_pose), best_hair_sim};
    res.hair_style = {static_cast<int>(best_style), best_hair_sim};

    const Zone ze = eye_zone(best_pose), zm = mouth_zone(best_pose);
    {
        PixelSet obs;
        for (const auto& [x, y] : band_black)
            if (ze.contains(x, y)) obs.insert({x, y});
        double best = -1.0;
        int marker = 0;
        for (int m = 0; m < kEyeMarkerCount; ++m) {
            const double sim = mask_similarity(obs, eye_pixels(m, best_pose), ze.area());
            if (sim > best) {
                best = sim;
                marker = m;
            }
        }
        res.eye_marker = {marker, best};
    }
    {
        PixelSet obs;
        for (const auto& [x, y] : band_black)
            if (zm.contains(x, y)) obs.insert({x, y});
        double best = -1.0;
        int expr = 0;
        for (int e = 0; e < kExpressionCount; ++e) {
            const double sim =
                mask_similarity(obs, mouth_pixels(static_cast<Expression>(e), best_pose), zm.area());
            if (sim > best) {
                best = sim;
                expr = e;
            }
        }
        res.expression = {expr, best};
    }

    // face color: disc below the hair cap, outside the mark zones
    {
        const int cx = face_cx(best_pose);
        std::vector<int> votes(kPaletteSize, 0);
        int sample = 0;
        for (int y = kFaceCy - 6; y <= kFaceCy + 12; ++y)
            for (int x = cx - 12; x <= cx + 12; ++x) {
                if (!in_face_disc(cx, x, y)) continue;
                if (ze.contains(x, y) || zm.contains(x, y)) continue;
                ++sample;
                if (qat(x, y) < kPaletteSize) ++votes[static_cast<size_t>(qat(x, y))];
            }
        res.face_color = mode_color(votes, sample);
    }

    // hair color: interior of the best-hypothesis hair region
    {
        const int cx = face_cx(best_pose);
        std::vector<int> votes(kPaletteSize, 0);
        int sample = 0;
        for (int y = 0; y < kCanvas; ++y)
            for (int x = 0; x < kCanvas; ++x) {
                if (!in_hair_region(best_style, cx, x, y)) continue;
                const bool interior = in_hair_region(best_style, cx, x - 1, y) &&
                                      in_hair_region(best_style, cx, x + 1, y) &&
                                      in_hair_region(best_style, cx, x, y - 1) &&
                                      in_hair_region(best_style, cx, x, y + 1);
                if (!interior) continue;
                ++sample;
                if (qat(x, y) < kPaletteSize) ++votes[static_cast<size_t>(qat(x, y))];
            }
        res.hair_color = mode_color(votes, sample);
    }

    // clothing: alternation mask picks the pattern, non-black pixels the color
    {
        PixelSet obs;
        std::vector<int> votes(kPaletteSize, 0);
        int nonblack = 0;
        for (int y = kClothTop; y <= kClothBottom; ++y)
            for (int x = kClothLeft; x <= kClothRight; ++x) {
                if (qat(x, y) == kBlack) {
                    obs.insert({x, y});
                } else {
                    ++nonblack;
                    ++votes[static_cast<size_t>(qat(x, y))];
                }
            }
        const int rect_area = (kClothBottom - kClothTop + 1) * (kClothRight - kClothLeft + 1);
        double best = -1.0;
        int pattern = 0;
        for (int pt = 0; pt < kClothingPatternCount; ++pt) {
            const double sim = mask_similarity(
                obs, clothing_black_pixels(static_cast<ClothingPattern>(pt), best_pose), rect_area);
            if (sim > best) {
                best = sim;
                pattern = pt;
            }
        }
        res.clothing_color = mode_color(votes, nonblack);
        res.clothing_pattern = {pattern, best * res.clothing_color.confidence};
    }

    return res;
}

AvatarIdentity random_identity(Rng& rng) {
    return identity_from_index(rng.uniform_int(kIdentitySpace));
}

TextCondition random_condition(Rng& rng) {
    return condition_from_index(rng.uniform_int(kConditionSpace));
}

const char* pose_name(Pose p) {
    switch (p) {
        case Pose::Left: return "left";
        case Pose::Center: return "center";
        case Pose::Right: return "right";
    }
    return "?";
}
const char* expression_name(Expression e) {
    return e == Expression::Neutral ? "neutral" : "smile";
}
const char* hair_style_name(HairStyle h) {
    switch (h) {
        case HairStyle::Cap: return "cap";
        case HairStyle::Spiky: return "spiky";
        case HairStyle::Long: return "long";
    }
    return "?";
}
const char* clothing_pattern_name(ClothingPattern p) {
    switch (p) {
        case ClothingPattern::Solid: return "solid";
        case ClothingPattern::Stripes: return "stripes";
        case ClothingPattern::Checker: return "checker";
    }
    return "?";
}
const char* attribute_name(AttributeKind k) {
    switch (k) {
        case AttributeKind::Face: return "face";
        case AttributeKind::Hair: return "hair";
        case AttributeKind::Clothing: return "clothing";
    }
    return "?";
}

Pose parse_pose(const std::string& s) {
    if (s == "left") return Pose::Left;
    if (s == "center") return Pose::Center;
    if (s == "right") return Pose::Right;
    throw std::invalid_argument("unknown pose: " + s);
}
Expression parse_expression(const std::string& s) {
    if (s == "neutral") return Expression::Neutral;
    if (s == "smile") return Expression::Smile;
    throw std::invalid_argument("unknown expression: " + s);
}
HairStyle parse_hair_style(const std::string& s) {
    if (s == "cap") return HairStyle::Cap;
    if (s == "spiky") return HairStyle::Spiky;
    if (s == "long") return HairStyle::Long;
    throw std::invalid_argument("unknown hair style: " + s);
}
ClothingPattern parse_clothing_pattern(const std::string& s) {
    if (s == "solid") return ClothingPattern::Solid;
    if (s == "stripes") return ClothingPattern::Stripes;
    if (s == "checker") return ClothingPattern::Checker;
    throw std::invalid_argument("unknown clothing pattern: " + s);
}

}  // namespace attrflow
