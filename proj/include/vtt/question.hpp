#ifndef VTT_QUESTION_HPP
#define VTT_QUESTION_HPP

namespace vtt {

// "Is concept `concept_id` present in sample `sample`?" with its ground
// truth. Both ids are indices into the owning Dataset's name tables.
struct Question {
  int sample = 0;
  int concept_id = 0;
  int gt = 0;  // 0 or 1

  bool operator==(const Question&) const = default;
};

}  // namespace vtt

#endif  // VTT_QUESTION_HPP
