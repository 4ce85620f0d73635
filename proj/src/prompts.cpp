#include "labelflow/prompts.hpp"

namespace labelflow::prompts {

// Task templates are kept byte-for-byte; trailing spaces at line ends are intentional.

const std::string_view kTier1QaTemplate = R"prompt(Retrieve the patient details and patient treatment details for patient 
{patient_id}. Based on the delivered treatment details, report the following
information, like this:

```
{
    "patient_id": "12345678",
    "first_name": "first name",
    "last_name": "last name (surname)",
    "sex": "male"/"female",
    "race": "put race here",
    "ethnicity": "put ethnicity here",
    "delivered_courses": [
        {
            "course_id": "course ID 1",
            "icd_codes": ["C61", "C75.1", ...],
            "delivered_plan_ids": ["plan ID 1", "plan ID 2", ...],
            "radiation_type": "proton" or "photon" or "electron"
        },
        {
            "course_id": "course ID 2",
            "icd_codes": ["C61", "C75.1", ...],
            "delivered_plan_ids": ["plan ID 1", "plan ID 2", ...],
            "radiation_type": "proton" or "photon" or "electron"
        },
    ]
}
```)prompt";

const std::string_view kOrnTemplate = R"prompt(Determine whether patient {patient_id} has ever experienced 
osteoradionecrosis (ORN). If the patient did experience ORN, 
then grade the severity (using the Marx staging system). 
Osteoradionecrosis (ORN) of the mandible refers to a condition 
occurring within the radiation treatment (RT) field in the head
and neck region, where mucosal breakdown or delayed healing 
leads to persistent exposure of the mandibular bone. Key criteria
include bone exposure lasting for at least three months, evidence
of necrotic (dead) bone, and the absence of recurrent tumor or 
metastases at the affected site. Additionally, ORN may present 
with radiographic evidence of bone necrosis even when the 
overlying mucosa remains intact. In order to determine whether 
the patient experienced ORN, first retrieve the patient details, 
patient diagnosis details, patient treatment details, radiology 
reports, pathology reports, and patient clinical notes (note_type 
of radiology, pathology, surgery, radiation_oncology, and ENT). 
Provide a detailed summary of the retrieved data, in the context 
of determining whether the patient experienced ORN, in a section 
called Patient History.

Next, in a section called Data Quantity, quantify the total 
amount of patient data that was retrieved by summing the 'number
of records count' from each of the retrieved patient data (not 
including patient details, patient diagnoses details, or patient
treatment details records).

Next, grade the severity of ORN in a section called Marx Staging.
The Marx staging system for grading ORN, proposed by Robert E. 
Marx in an article entitled "Osteoradionecrosis: A New Concept 
of Its Pathophysiology", is as follows: "Stage 1 is defined as 
exposed alveolar or mandibular bone without pathologic fracture.
If hyperbaric oxygen therapy (HBO) is used and the exposed bone
responds positively as a result, this is an indication of stage
1; Stage 2 is disease which does not respond to HBO therapy if 
it is given, and requires sequestrectomy and saucerization; and
Stage 3 is full-thickness bone damage or pathological fracture,
usually requiring complete resection and reconstruction with free
tissue." List any evidence for/against each stage (1, 2, or 3). 
If none of the criteria is met for any stage, as defined, then we 
shall define this as stage 0 (no evidence of ORN).

Finally, in a section called Concluding Remarks, make the case 
for or against the patient having ORN. After your concluding 
remarks, **provide the results using the following format**:

```
{
    'stage': '0, 1, 2, or 3', 
    'total number of records': '10, 14, 25, 115, etc.'
}
```)prompt";

const std::string_view kRecurrenceTemplate = R"prompt(#### Task
I need your help in determining whether patient {patient_id} has 
had cancer recurrence at any point in their history relating to 
one of their prior cancer diagnoses.

#### Definition of Cancer Recurrence
According to the National Cancer Institute, recurrent cancer is 
cancer that has recurred (come back), usually after a period of 
time during which the cancer could not be detected. The cancer 
may come back to the same place as the original (primary) tumor 
or to another place in the body, but is only considered 
recurrence if it is related to the primary tumor. If it is a 
new tumor that is unrelated (a new, secondary primary tumor), 
then it is not recurrence relating to the original primary 
tumor. However, there is also the possibility that recurrence 
occurred relating to the secondary primary tumor.

#### Data Retrieval
To make a determination of whether the patient experienced cancer
recurrence in their history, you'll need to retrieve the following
data...

    * Patient treatment details
    * Radiation oncology notes (`note_type` = `radiation_oncology`)
    * Pathology notes (`note_type` = `pathology`)
    * Radiology notes (`note_type` = `radiology`)
    * Urology notes (`note_type` = `urology`... wait until you see
      diagnosis and only retrieve if the diagnosis is related to 
      urology)
    * ENT notes (`note_type` = `ent`... wait until you see diagnosis
      and only retrieve if the diagnosis is related to head and neck 
      cancers)
    * Radiology reports

When pulling any of the radiation oncology notes, the pathology 
notes, radiology notes, urology notes, ENT notes, and the radiology
reports, use the `date_minimum` input (I added `date_minimum` as a
new input for these data retrieval functions, format is 
treatment date of the earliest treatment course as the 
`date_minimum`. Because you need the treatment details and the 
diagnoses details before retrieving certain patient data, you should
retrieve the treatment details and diagnoses details first. Go ahead
and retrieve them. Next, remark as to when the last treatment date 
of the first treatment course occurred, what the diagnoses are, and
whether the urology or ENT clinical notes are needed (based on 
whether the diagnoses are urology-related or head-and-neck-related
- note that prostate cancer is related to urology). After that, 
depending on the last treatment data and diagnosis, retrieve the 
rest of the patient data. If the patient does not have treatment 
details, then do not use the `date_minimum` input.
    
#### Instructions for Determining Cancer Recurrence
Before providing a yes/no answer on whether the patient had cancer
recurrence...

    * Summarize each dataset that was retrieved (including the 
      treatment details) in a section called "Summary of Retrieved 
      Data". Create a subsection for each summary.
    * Summarize the diagnoses that were treated noting the treatment 
      dates in a section called "Summary of Diagnoses".
    * Construct a timeline of important events that include the 
      diagnostic imaging reports, pathology imaging/lab reports, the
      actual diagnosis of the disease(s) with onset date(s), the 
      treatment of the disease(s), follow-up notes (note which
      diagnosis/treatment the follow-up is referring to (most likely
      the most recent one)) and any other important information 
      relating to the progression of disease over time or lack 
      thereof in a section called "Disease Timeline". You must 
      include PSA measurements in the timeline if the patient had 
      prostate cancer.
    * Next, we want to consider an argument that supports recurrence
      and an argument that does not support recurrence in a section 
      called "Argument For Recurrence/Argument Against Recurrence". 
      First, write a paragraph (starting with "The most plausible 
      argument supporting the case that cancer recurrence occurred in 
      their history is...") that describes the most plausible 
      explanation for how the cancer recurred in their history, 
      progressing from one diagnosis to another (consider spatial 
      proximity and time proximity). Next, write a paragraph (starting 
      with "The most plausible argument supporting the case that 
      cancer recurrence did not occur in their history is...") that 
      describes the most plausible explanation for how/why the cancer 
      did not recur in their history. You must write both of these 
      paragraphs unless there was only one diagnosis in their history
      (in which case recurrence was very unlikely).
    * Finally, explain your reasoning as to which choice is most 
      plausible, weighing the evidence, followed by a clear statement 
      of your final decision in a section called "Concluding Remarks".
    * Provide the answer in an "Answer" section using this JSON format:
```json
{{
    "recurrence": "yes/no"
}}
```)prompt";

}  // namespace labelflow::prompts
